#include <catch2/catch_amalgamated.hpp>

#include "scenetext/annotation.hpp"
#include "scenetext/rng.hpp"

using namespace scenetext;

TEST_CASE("icdar word lines parse to axis-aligned quads", "[annotation]") {
    const std::string gt = "10,20,50,40,\"cat\"\r\n5, 6, 9, 12, \"dog house\"\n\n";
    auto anns = parse_ground_truth(gt, GtFormat::IcdarWord);
    REQUIRE(anns.size() == 2);
    CHECK(anns[0].transcript == "cat");
    CHECK(anns[0].quad.pts[0].x == 10);
    CHECK(anns[0].quad.pts[0].y == 20);
    CHECK(anns[0].quad.pts[2].x == 50);
    CHECK(anns[0].quad.pts[2].y == 40);
    CHECK(anns[1].transcript == "dog house");
}

TEST_CASE("quad lines parse with verbatim transcript", "[annotation]") {
    const std::string gt = "10,10,50,10,50,30,10,30,cat\n0,0,4,0,4,4,0,4,###\n";
    auto anns = parse_ground_truth(gt, GtFormat::QuadLine);
    REQUIRE(anns.size() == 2);
    CHECK(anns[0].transcript == "cat");
    CHECK(anns[0].quad.pts[3].x == 10);
    CHECK(anns[0].quad.pts[3].y == 30);
    CHECK(anns[1].transcript == "###");
}

TEST_CASE("BOM and malformed lines", "[annotation]") {
    const std::string bom = "\xEF\xBB\xBF" "1,2,3,4,\"x\"\n";
    auto anns = parse_ground_truth(bom, GtFormat::IcdarWord);
    REQUIRE(anns.size() == 1);
    CHECK(anns[0].transcript == "x");

    CHECK_THROWS_AS(parse_ground_truth("1,2,three,4,\"x\"\n", GtFormat::IcdarWord), ParseError);
    CHECK_THROWS_AS(parse_ground_truth("1,2,3\n", GtFormat::QuadLine), ParseError);
}

TEST_CASE("format emits the documented example", "[annotation]") {
    Quad q;
    q.pts[0] = {10, 10};
    q.pts[1] = {50, 10};
    q.pts[2] = {50, 30};
    q.pts[3] = {10, 30};
    CHECK(format_annotation_line(q, "cat") == "10,10,50,10,50,30,10,30,cat");
}

TEST_CASE("emit-parse round trip over random quads", "[annotation]") {
    Rng rng(4242);
    const std::vector<std::string> words = {"cat", "Grand Café", "综合市场", "x,y", "123"};
    std::string blob;
    std::vector<Quad> quads;
    std::vector<std::string> texts;
    for (int i = 0; i < 100; ++i) {
        Quad q;
        for (auto& p : q.pts)
            p = {static_cast<double>(rng.bounded(2000)), static_cast<double>(rng.bounded(2000))};
        const std::string& text = words[rng.bounded(words.size())];
        blob += format_annotation_line(q, text);
        blob += '\n';
        quads.push_back(q);
        texts.push_back(text);
    }
    auto anns = parse_ground_truth(blob, GtFormat::QuadLine);
    REQUIRE(anns.size() == 100);
    for (size_t i = 0; i < anns.size(); ++i) {
        CHECK(anns[i].transcript == texts[i]);
        for (int k = 0; k < 4; ++k) {
            CHECK(anns[i].quad.pts[k].x == quads[i].pts[k].x);
            CHECK(anns[i].quad.pts[k].y == quads[i].pts[k].y);
        }
    }
}
