#include <catch2/catch_amalgamated.hpp>

#include "scenetext/semantics.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace scenetext;

namespace {

SemanticMap make_map(int w, int h, const std::vector<uint16_t>& labels,
                     std::map<uint16_t, std::string> palette) {
    SemanticMap m;
    m.width = w;
    m.height = h;
    m.labels = labels;
    m.palette = std::move(palette);
    return m;
}

} // namespace

TEST_CASE("load_semantic_map validates palette coverage", "[semantics]") {
    auto dir = fixtures::make_temp_dir("sem");
    std::vector<uint16_t> labels(8 * 6, 7);
    write_png_gray16(dir / "labels.png", 8, 6, labels);
    fixtures::write_text_file(dir / "palette.tsv", "# comment line\n7\twall\n");
    SemanticMap map = load_semantic_map(dir / "labels.png", dir / "palette.tsv");
    CHECK(map.width == 8);
    CHECK(map.height == 6);
    CHECK(map.class_name(7) == "wall");

    // ids {1,2} with palette covering only 1 -> UnknownClassId(2)
    std::vector<uint16_t> bad(4 * 4, 1);
    bad[5] = 2;
    write_png_gray16(dir / "bad.png", 4, 4, bad);
    fixtures::write_text_file(dir / "p2.tsv", "1\tsky\n");
    try {
        load_semantic_map(dir / "bad.png", dir / "p2.tsv");
        FAIL("expected UnknownClassId");
    } catch (const UnknownClassId& e) {
        CHECK(e.id() == 2);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("load_semantic_map counts regions like a histogram", "[semantics]") {
    auto dir = fixtures::make_temp_dir("sem-hist");
    // 5-region fixture in the COCO-Stuff style: stripes of different ids
    const int w = 50, h = 20;
    std::vector<uint16_t> labels(static_cast<size_t>(w) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) labels[static_cast<size_t>(y) * w + x] =
            static_cast<uint16_t>(1 + x / 10);
    write_png_gray16(dir / "labels.png", w, h, labels);
    fixtures::write_text_file(dir / "palette.tsv",
                              "1\twall\n2\tfloor\n3\tsky\n4\troad\n5\ttable\n");
    SemanticMap map = load_semantic_map(dir / "labels.png", dir / "palette.tsv");

    // independent histogram
    std::map<uint16_t, int64_t> hist;
    for (uint16_t v : labels) ++hist[v];
    std::map<uint16_t, int64_t> got;
    for (uint16_t v : map.labels) ++got[v];
    CHECK(got == hist);
    for (const auto& [id, n] : hist) CHECK(n == 10 * 20);
    std::filesystem::remove_all(dir);
}

TEST_CASE("semantic_mask follows the policy lists", "[semantics]") {
    SemanticPolicy allow_wall;
    allow_wall.allow = {"wall"};
    allow_wall.default_rule = PolicyDefault::Deny;

    auto all_wall = make_map(6, 4, std::vector<uint16_t>(24, 1), {{1, "wall"}});
    BinaryMask m1 = semantic_mask(all_wall, allow_wall);
    CHECK(m1.count_true() == 24);

    auto all_sky = make_map(6, 4, std::vector<uint16_t>(24, 9), {{9, "sky"}});
    BinaryMask m2 = semantic_mask(all_sky, allow_wall);
    CHECK(m2.count_true() == 0);

    // half wall / half sheep with an explicit deny
    std::vector<uint16_t> half(24, 1);
    for (int i = 12; i < 24; ++i) half[i] = 2;
    auto mixed = make_map(6, 4, half, {{1, "wall"}, {2, "sheep"}});
    SemanticPolicy policy;
    policy.allow = {"wall"};
    policy.deny = {"sheep"};
    BinaryMask m3 = semantic_mask(mixed, policy);
    int64_t wall_count = 0;
    for (uint16_t v : half)
        if (v == 1) ++wall_count;
    CHECK(m3.count_true() == wall_count);
}

TEST_CASE("policy validation and defaults", "[semantics]") {
    SemanticPolicy p;
    p.allow = {"wall"};
    p.deny = {"wall"};
    CHECK_THROWS_AS(p.validate(), ConfigError);

    SemanticPolicy q = SemanticPolicy::from_json(nlohmann::json::parse(
        R"({"allow": ["wall"], "deny": ["sky"], "default": "allow"})"));
    CHECK(q.allows("wall"));
    CHECK_FALSE(q.allows("sky"));
    CHECK(q.allows("unheard-of"));

    // mask is a pure function of names: renaming ids consistently changes nothing
    std::vector<uint16_t> labels = {1, 2, 1, 2};
    auto a = make_map(4, 1, labels, {{1, "wall"}, {2, "sky"}});
    std::vector<uint16_t> relabeled = {5, 9, 5, 9};
    auto b = make_map(4, 1, relabeled, {{5, "wall"}, {9, "sky"}});
    CHECK(semantic_mask(a, q).data == semantic_mask(b, q).data);
}

TEST_CASE("inverted policy complements the mask", "[semantics]") {
    std::vector<uint16_t> labels(30);
    for (size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<uint16_t>(i % 3);
    auto map = make_map(10, 3, labels, {{0, "wall"}, {1, "sky"}, {2, "road"}});
    SemanticPolicy policy;
    policy.allow = {"wall", "road"};
    policy.deny = {"sky"};
    BinaryMask m = semantic_mask(map, policy);
    BinaryMask inv = semantic_mask(map, policy.inverted());
    CHECK(m.count_true() + inv.count_true() == 30);
}

TEST_CASE("connected_regions on empty and block masks", "[semantics]") {
    BinaryMask empty(16, 16, false);
    CHECK(connected_regions(empty, 1).components.empty());

    BinaryMask block(32, 32, false);
    for (int y = 4; y < 14; ++y)
        for (int x = 6; x < 16; ++x) block.set(x, y, true);
    RegionLabeling r = connected_regions(block, 50);
    REQUIRE(r.components.size() == 1);
    CHECK(r.components[0].area == 100);
    CHECK(r.components[0].bbox.x == 6);
    CHECK(r.components[0].bbox.y == 4);
    CHECK(r.components[0].bbox.w == 10);
    CHECK(r.components[0].bbox.h == 10);
}

TEST_CASE("diagonal blocks split under 4-connectivity", "[semantics]") {
    BinaryMask m(8, 8, false);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) m.set(x, y, true);
    for (int y = 4; y < 8; ++y)
        for (int x = 4; x < 8; ++x) m.set(x, y, true);
    RegionLabeling r = connected_regions(m, 1);
    CHECK(r.components.size() == 2);

    std::vector<int64_t> areas;
    auto labels = oracles::flood_fill_4(m, areas);
    CHECK(areas.size() == r.components.size());

    // labels agree up to renaming: every library component must be one
    // oracle component and vice versa
    std::map<int, int> fwd;
    for (size_t i = 0; i < labels.size(); ++i) {
        const int a = r.labels[i], b = labels[i];
        CHECK((a == -1) == (b == -1));
        if (a == -1) continue;
        auto [it, fresh] = fwd.try_emplace(a, b);
        if (!fresh) CHECK(it->second == b);
    }
}

TEST_CASE("random masks match the flood-fill oracle", "[semantics]") {
    Rng rng(12345);
    for (int trial = 0; trial < 5; ++trial) {
        BinaryMask m(24, 18);
        for (auto& v : m.data) v = rng.next_double() < 0.45 ? 1 : 0;
        RegionLabeling r = connected_regions(m, 1);
        std::vector<int64_t> areas;
        auto labels = oracles::flood_fill_4(m, areas);
        REQUIRE(r.components.size() == areas.size());
        // maximality: no two distinct components are 4-adjacent
        for (int y = 0; y < m.height; ++y) {
            for (int x = 0; x < m.width; ++x) {
                const int32_t a = r.label_at(x, y);
                if (a == -1) continue;
                if (x + 1 < m.width && r.label_at(x + 1, y) != -1)
                    CHECK(r.label_at(x + 1, y) == a);
                if (y + 1 < m.height && r.label_at(x, y + 1) != -1)
                    CHECK(r.label_at(x, y + 1) == a);
            }
        }
    }
}

TEST_CASE("min_area filters small components", "[semantics]") {
    BinaryMask m(20, 10, false);
    m.set(0, 0, true);  // area 1
    for (int y = 2; y < 8; ++y)
        for (int x = 4; x < 16; ++x) m.set(x, y, true);  // area 72
    RegionLabeling r = connected_regions(m, 10);
    REQUIRE(r.components.size() == 1);
    CHECK(r.components[0].area == 72);
    CHECK(r.label_at(0, 0) == -1);  // filtered pixel unlabeled
}
