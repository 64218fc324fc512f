// Command-line front end: synth (batch image synthesis), build-stats
// (appearance database construction), preview (manifest overlay).

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "scenetext/appearance.hpp"
#include "scenetext/pipeline.hpp"
#include "scenetext/version.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
    CLI::App app{"Scene-text training image synthesizer"};
    app.set_version_flag("--version", scenetext::kEngineVersion);
    app.require_subcommand(1);

    // --- synth ---
    auto* synth = app.add_subcommand("synth", "Synthesize annotated scene-text images");
    std::string config_path;
    uint64_t seed_override = 0;
    int count_override = -1;
    int jobs = 1;
    bool debug_masks = false;
    bool seed_given = false;
    synth->add_option("--config", config_path, "Synthesis config JSON")->required();
    synth->add_option("--seed", seed_override, "Override the config seed")
        ->each([&](const std::string&) { seed_given = true; });
    synth->add_option("--count", count_override, "Override the config sample count");
    synth->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    synth->add_flag("--debug-masks", debug_masks, "Emit saliency/eligibility/overlay PNGs");

    // --- build-stats ---
    auto* stats = app.add_subcommand("build-stats", "Build the appearance database from a dataset");
    std::string dataset_dir, gt_format = "icdar-word", db_out;
    stats->add_option("--dataset", dataset_dir, "Dataset root (images + gt files)")->required();
    stats->add_option("--format", gt_format, "Ground-truth format: icdar-word|quad")
        ->check(CLI::IsMember({"icdar-word", "quad"}));
    stats->add_option("--out", db_out, "Output database path")->required();

    // --- preview ---
    auto* prev = app.add_subcommand("preview", "Draw quads and transcripts over a sample");
    std::string manifest_path, sample_id, preview_out;
    prev->add_option("--manifest", manifest_path, "Run manifest JSON")->required();
    prev->add_option("--sample", sample_id, "Sample id, e.g. img_000003")->required();
    prev->add_option("--out", preview_out, "Output PNG (default <sample>_preview.png)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth) {
            scenetext::SynthConfig config = scenetext::SynthConfig::load(config_path);
            if (seed_given) config.seed = seed_override;
            if (count_override >= 0) config.count = count_override;
            if (debug_masks) config.debug_masks = true;
            auto log = [](const std::string& msg) { std::cerr << msg << '\n'; };
            scenetext::RunResult result = scenetext::run_synth(config, jobs, log);
            std::cout << "produced " << result.produced << "/" << result.requested
                      << " samples in " << config.output_dir.string() << '\n';
            return result.short_run() ? 2 : 0;
        }
        if (*stats) {
            auto log = [](const std::string& msg) { std::cerr << msg << '\n'; };
            scenetext::AppearanceDatabase db = scenetext::build_database(
                dataset_dir, scenetext::gt_format_from_string(gt_format), log);
            db.save(db_out);
            std::cout << "wrote " << db.records.size() << " records to " << db_out << '\n';
            return 0;
        }
        if (*prev) {
            fs::path out = preview_out.empty() ? fs::path(sample_id + "_preview.png")
                                               : fs::path(preview_out);
            scenetext::preview(manifest_path, sample_id, out);
            std::cout << "wrote " << out.string() << '\n';
            return 0;
        }
    } catch (const scenetext::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const scenetext::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
