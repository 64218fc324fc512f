#pragma once

// Shared synthetic fixture builders for unit, acceptance and CLI tests.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "scenetext/appearance.hpp"
#include "scenetext/image_io.hpp"
#include "scenetext/pipeline.hpp"
#include "scenetext/raster.hpp"
#include "scenetext/rng.hpp"

namespace fixtures {

inline std::filesystem::path test_data_dir() {
    return std::filesystem::path(SCENETEXT_TEST_DATA_DIR);
}

inline std::filesystem::path test_font() {
    return test_data_dir() / "fonts" / "DejaVuSans.ttf";
}

/// Fresh scratch directory under the system temp root.
inline std::filesystem::path make_temp_dir(const std::string& stem) {
    static std::atomic<uint64_t> counter{0};
    const auto base = std::filesystem::temp_directory_path();
    std::filesystem::path dir;
    do {
        dir = base / (stem + "-" + std::to_string(::getpid()) + "-" +
                      std::to_string(counter.fetch_add(1)));
    } while (std::filesystem::exists(dir));
    std::filesystem::create_directories(dir);
    return dir;
}

inline scenetext::ImageU8 solid_image(int w, int h, uint8_t r, uint8_t g, uint8_t b) {
    scenetext::ImageU8 img(w, h, 3, scenetext::Colorspace::Srgb8);
    for (size_t i = 0; i < img.pixel_count(); ++i) {
        img.data[3 * i] = r;
        img.data[3 * i + 1] = g;
        img.data[3 * i + 2] = b;
    }
    return img;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

/// Synthetic appearance database: random near-unit HoG vectors and
/// plausible Lab statistics, deterministic under the seed.
inline scenetext::AppearanceDatabase synthetic_db(int n, uint64_t seed) {
    scenetext::Rng rng(seed);
    scenetext::AppearanceDatabase db;
    for (int i = 0; i < n; ++i) {
        scenetext::AppearanceRecord rec;
        for (int d = 0; d < scenetext::kHogDim; ++d)
            rec.h_b.v[d] = static_cast<float>(rng.next_double() * 0.3);
        rec.mu_L = static_cast<float>(20 + 60 * rng.next_double());
        rec.sigma_L = static_cast<float>(1 + 4 * rng.next_double());
        rec.mu_a = static_cast<float>(rng.uniform(-25, 25));
        rec.sigma_a = static_cast<float>(1 + 2 * rng.next_double());
        rec.mu_b = static_cast<float>(rng.uniform(-25, 25));
        rec.sigma_b = static_cast<float>(1 + 2 * rng.next_double());
        char buf[32];
        std::snprintf(buf, sizeof buf, "syn#%04d", i);
        rec.source_id = buf;
        db.records.push_back(std::move(rec));
    }
    return db;
}

/// A complete on-disk synthesis environment: paired backgrounds and
/// semantic maps (flat allowed region next to a distinct denied region),
/// palette, policy, database, fonts dir (symlinked test fonts), corpus and
/// a ready config. Deterministic fixture set.
struct SynthEnv {
    std::filesystem::path root;
    scenetext::SynthConfig config;
    std::filesystem::path config_path;
};

inline SynthEnv make_synth_env(const std::string& stem, int n_backgrounds, int width = 320,
                               int height = 240, int count = 3, uint64_t seed = 42,
                               bool invert_policy = false) {
    namespace fs = std::filesystem;
    using namespace scenetext;
    SynthEnv env;
    env.root = make_temp_dir(stem);
    fs::create_directories(env.root / "backgrounds");
    fs::create_directories(env.root / "maps");
    fs::create_directories(env.root / "out");

    // each background: a large homogeneous "wall" (allowed) occupying the
    // left 70% and a busier "sky" strip (denied) on the right
    for (int i = 0; i < n_backgrounds; ++i) {
        Rng rng(1000 + i);
        const uint8_t wr = static_cast<uint8_t>(100 + rng.bounded(80));
        const uint8_t wg = static_cast<uint8_t>(100 + rng.bounded(80));
        const uint8_t wb = static_cast<uint8_t>(100 + rng.bounded(80));
        ImageU8 img = solid_image(width, height, wr, wg, wb);
        std::vector<uint16_t> labels(static_cast<size_t>(width) * height, 1);  // wall
        const int split = width * 7 / 10;
        for (int y = 0; y < height; ++y) {
            for (int x = split; x < width; ++x) {
                const size_t p = static_cast<size_t>(y) * width + x;
                labels[p] = 2;  // sky
                img.data[3 * p] = static_cast<uint8_t>(40 + rng.bounded(40));
                img.data[3 * p + 1] = static_cast<uint8_t>(80 + rng.bounded(60));
                img.data[3 * p + 2] = static_cast<uint8_t>(180 + rng.bounded(60));
            }
        }
        char name[32];
        std::snprintf(name, sizeof name, "bg_%03d", i);
        write_png(env.root / "backgrounds" / (std::string(name) + ".png"), img);
        write_png_gray16(env.root / "maps" / (std::string(name) + ".png"), width, height, labels);
    }
    write_text_file(env.root / "maps" / "palette.tsv", "1\twall\n2\tsky\n");
    write_text_file(env.root / "policy.json",
                    invert_policy
                        ? R"({"allow": ["sky"], "deny": ["wall"], "default": "deny"})"
                        : R"({"allow": ["wall"], "deny": ["sky"], "default": "deny"})");

    synthetic_db(64, 7).save(env.root / "appearance.jsonl");

    fs::create_directories(env.root / "fonts");
    fs::copy_file(test_font(), env.root / "fonts" / "DejaVuSans.ttf",
                  fs::copy_options::overwrite_existing);

    write_text_file(env.root / "corpus.txt",
                    "market bakery station corner garden street bridge harbor\n"
                    "museum library theatre plaza avenue tunnel summit meadow\n");

    env.config.backgrounds_dir = env.root / "backgrounds";
    env.config.semantic_maps_dir = env.root / "maps";
    env.config.palette_file = env.root / "maps" / "palette.tsv";
    env.config.policy_file = env.root / "policy.json";
    env.config.appearance_db = env.root / "appearance.jsonl";
    env.config.font_dir = env.root / "fonts";
    env.config.output_dir = env.root / "out";
    env.config.corpus_paths = {env.root / "corpus.txt"};
    env.config.granularity = Granularity::Word;
    env.config.seed = seed;
    env.config.count = count;

    env.config_path = env.root / "config.json";
    {
        nlohmann::json j = env.config.to_json();
        std::ofstream out(env.config_path);
        out << j.dump(2) << '\n';
    }
    return env;
}

} // namespace fixtures
