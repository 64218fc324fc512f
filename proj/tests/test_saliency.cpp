#include <catch2/catch_amalgamated.hpp>

#include "scenetext/saliency.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace scenetext;

TEST_CASE("uniform image has zero saliency and a full mask", "[saliency]") {
    ImageU8 img = fixtures::solid_image(40, 30, 90, 120, 150);
    SaliencyMap map = compute_saliency(img);
    CHECK(map.mean == 0.f);
    for (float v : map.values) CHECK(v == 0.f);

    SaliencyMask mask = low_saliency_mask(map);
    CHECK(mask.threshold == 0.f);
    CHECK(mask.mask.count_true() == 40 * 30);
}

TEST_CASE("rare distant color dominates a two-tone image", "[saliency]") {
    // 90% gray, 10% red patch: the rare red accumulates the larger
    // frequency-weighted distance sum
    ImageU8 img = fixtures::solid_image(40, 40, 128, 128, 128);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 20; ++x)
            for (int c = 0; c < 3; ++c)
                img.at(x, y, c) = c == 0 ? 220 : 30;
    std::vector<double> raw = saliency_contrast_raw(img);
    const double red = raw[0];
    const double gray = raw[39 * 40 + 39];
    CHECK(red > gray);

    SaliencyMap map = compute_saliency(img);
    SaliencyMask mask = low_saliency_mask(map);
    // far from the patch the gray stays below the mean
    CHECK(mask.mask.test(39, 39));
}

TEST_CASE("three-color fixture matches the brute-force contrast oracle", "[saliency]") {
    // 50/30/20 split keeps every color above the coverage cut so the
    // quantized path must agree with the exact per-color sum
    ImageU8 img(40, 20, 3, Colorspace::Srgb8);
    for (int y = 0; y < 20; ++y) {
        for (int x = 0; x < 40; ++x) {
            uint8_t r, g, b;
            if (x < 20) { r = 60; g = 60; b = 60; }
            else if (x < 32) { r = 200; g = 40; b = 40; }
            else { r = 40; g = 90; b = 220; }
            img.at(x, y, 0) = r;
            img.at(x, y, 1) = g;
            img.at(x, y, 2) = b;
        }
    }
    std::vector<double> got = saliency_contrast_raw(img);
    std::vector<double> want = oracles::contrast_saliency(img);
    REQUIRE(got.size() == want.size());
    for (size_t i = 0; i < got.size(); ++i)
        CHECK(got[i] == Catch::Approx(want[i]).margin(1e-5));
}

TEST_CASE("half-and-half map thresholds at the mean", "[saliency]") {
    SaliencyMap map;
    map.width = 10;
    map.height = 10;
    map.values.assign(100, 0.f);
    for (int i = 50; i < 100; ++i) map.values[i] = 1.f;
    map.mean = 0.5f;
    SaliencyMask mask = low_saliency_mask(map);
    CHECK(mask.threshold == 0.5f);
    for (int i = 0; i < 50; ++i) CHECK(mask.mask.data[i] == 1);
    for (int i = 50; i < 100; ++i) CHECK(mask.mask.data[i] == 0);
}

TEST_CASE("random map mask count equals a direct scan", "[saliency]") {
    Rng rng(31);
    ImageU8 img(30, 22, 3, Colorspace::Srgb8);
    for (auto& v : img.data) v = static_cast<uint8_t>(rng.bounded(256));
    SaliencyMap map = compute_saliency(img);

    // cached mean matches the arithmetic mean
    double mean = 0;
    for (float v : map.values) mean += v;
    mean /= static_cast<double>(map.values.size());
    CHECK(map.mean == Catch::Approx(mean).margin(1e-6));

    SaliencyMask mask = low_saliency_mask(map);
    int64_t want = 0;
    for (float v : map.values)
        if (v <= map.mean) ++want;
    CHECK(mask.mask.count_true() == want);
    // exact agreement pixel by pixel
    for (size_t i = 0; i < map.values.size(); ++i)
        CHECK((map.values[i] <= mask.threshold) == (mask.mask.data[i] != 0));
}

TEST_CASE("saliency values normalized into [0,1]", "[saliency]") {
    Rng rng(77);
    ImageU8 img(24, 24, 3, Colorspace::Srgb8);
    for (auto& v : img.data) v = static_cast<uint8_t>(rng.bounded(256));
    SaliencyMap map = compute_saliency(img);
    float mx = 0, mn = 1;
    for (float v : map.values) {
        CHECK(v >= 0.f);
        CHECK(v <= 1.f);
        mx = std::max(mx, v);
        mn = std::min(mn, v);
    }
    CHECK(mx == 1.0f);
    CHECK(mn == 0.0f);
}

TEST_CASE("monotone contrast: moving one color further away raises its saliency",
          "[saliency]") {
    // two images identical except one color is pushed further from the rest
    auto build = [](uint8_t blue) {
        ImageU8 img = fixtures::solid_image(30, 30, 100, 100, 100);
        for (int y = 0; y < 10; ++y)
            for (int x = 0; x < 30; ++x) {
                img.at(x, y, 0) = 40;
                img.at(x, y, 1) = 40;
                img.at(x, y, 2) = blue;
            }
        return img;
    };
    std::vector<double> near = saliency_contrast_raw(build(120));
    std::vector<double> far = saliency_contrast_raw(build(250));
    CHECK(far[0] >= near[0]);
}
