#include <catch2/catch_amalgamated.hpp>

#include "scenetext/corpus.hpp"

#include "fixtures.hpp"

using namespace scenetext;

TEST_CASE("word mode splits and strips punctuation-only tokens", "[corpus]") {
    auto dir = fixtures::make_temp_dir("corpus-word");
    fixtures::write_text_file(dir / "a.txt", "the quick fox");
    TextCorpus c = load_corpus({dir / "a.txt"}, Granularity::Word);
    REQUIRE(c.units.size() == 3);
    CHECK(c.units[0] == "the");
    CHECK(c.units[2] == "fox");

    fixtures::write_text_file(dir / "b.txt", "wait -- what ?! don't ... stop");
    TextCorpus b = load_corpus({dir / "b.txt"}, Granularity::Word);
    REQUIRE(b.units.size() == 4);
    CHECK(b.units[0] == "wait");
    CHECK(b.units[1] == "what");
    CHECK(b.units[2] == "don't");
    CHECK(b.units[3] == "stop");
    for (const auto& u : b.units)
        for (char ch : u) CHECK_FALSE(corpus_detail::is_ascii_space(ch));
    std::filesystem::remove_all(dir);
}

TEST_CASE("line mode keeps non-blank lines verbatim", "[corpus]") {
    auto dir = fixtures::make_temp_dir("corpus-line");
    fixtures::write_text_file(dir / "a.txt", "first line\n\n  \nsecond line\r\nthird\n");
    TextCorpus c = load_corpus({dir / "a.txt"}, Granularity::Line);
    REQUIRE(c.units.size() == 3);
    CHECK(c.units[0] == "first line");
    CHECK(c.units[1] == "second line");
    CHECK(c.units[2] == "third");
    std::filesystem::remove_all(dir);
}

TEST_CASE("mixed English and Chinese lines survive byte-exactly", "[corpus]") {
    auto dir = fixtures::make_temp_dir("corpus-cjk");
    const std::string zh1 = "\xE7\xBB\xBC\xE5\x90\x88\xE5\xB8\x82\xE5\x9C\xBA";  // 综合市场
    const std::string zh2 = "\xE5\x8C\x97\xE4\xBA\xAC\xE5\x9B\xBE\xE4\xB9\xA6\xE9\xA6\x86 cafe";
    const std::string content = "hello world\n" + zh1 + "\n" + zh2 + "\n";
    fixtures::write_text_file(dir / "mix.txt", content);
    TextCorpus c = load_corpus({dir / "mix.txt"}, Granularity::Line);

    // line-count oracle: number of newline-terminated non-blank lines
    int64_t lines = 3;
    REQUIRE(c.units.size() == static_cast<size_t>(lines));
    CHECK(c.units[1] == zh1);
    CHECK(c.units[2] == zh2);
    std::filesystem::remove_all(dir);
}

TEST_CASE("invalid UTF-8 reports the byte offset", "[corpus]") {
    auto dir = fixtures::make_temp_dir("corpus-bad");
    std::string bad = "good ";
    bad += static_cast<char>(0xC0);  // overlong lead byte
    bad += "tail";
    fixtures::write_text_file(dir / "bad.txt", bad);
    try {
        load_corpus({dir / "bad.txt"}, Granularity::Word);
        FAIL("expected EncodingError");
    } catch (const EncodingError& e) {
        CHECK(e.offset() == 5);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("sample_text is uniform, deterministic and closed", "[corpus]") {
    TextCorpus c;
    c.units = {"u0", "u1", "u2", "u3", "u4", "u5", "u6", "u7", "u8", "u9"};

    TextCorpus single;
    single.units = {"only"};
    Rng rs(3);
    CHECK(sample_text(single, rs) == "only");

    Rng r1(42), r2(42);
    for (int i = 0; i < 20; ++i) CHECK(sample_text(c, r1) == sample_text(c, r2));

    Rng rng(7);
    std::map<std::string, int> counts;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const std::string& u = sample_text(c, rng);
        // closure: every draw is a member
        CHECK(std::find(c.units.begin(), c.units.end(), u) != c.units.end());
        ++counts[u];
    }
    for (const auto& [u, k] : counts)
        CHECK(std::abs(k / static_cast<double>(n) - 0.1) <= 0.02);

    TextCorpus empty;
    Rng re(1);
    CHECK_THROWS_AS(sample_text(empty, re), EmptyCorpus);
}
