#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scenetext/appearance.hpp"
#include "scenetext/corpus.hpp"
#include "scenetext/errors.hpp"
#include "scenetext/fonts.hpp"
#include "scenetext/image_io.hpp"
#include "scenetext/placement.hpp"
#include "scenetext/rendering.hpp"
#include "scenetext/saliency.hpp"
#include "scenetext/semantics.hpp"
#include "scenetext/version.hpp"

namespace scenetext {

struct SynthConfig {
    std::filesystem::path backgrounds_dir;
    std::filesystem::path semantic_maps_dir;
    std::filesystem::path palette_file;   // defaults to semantic_maps_dir/palette.tsv
    std::filesystem::path policy_file;
    std::filesystem::path appearance_db;
    std::filesystem::path font_dir;
    std::filesystem::path output_dir;
    std::vector<std::filesystem::path> corpus_paths;
    std::vector<std::filesystem::path> corpus_secondary_paths;
    std::vector<std::string> corpus_langs;
    std::vector<std::string> corpus_secondary_langs;
    double corpus_mix = 0.5;  // probability of drawing from the primary pool
    Granularity granularity = Granularity::Word;
    int max_instances_per_image = 5;
    uint64_t seed = 0;
    int count = 0;
    bool debug_masks = false;
    int retry_budget = 3;
    PlacementParams placement;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["backgrounds_dir"] = backgrounds_dir.string();
        j["semantic_maps_dir"] = semantic_maps_dir.string();
        j["palette_file"] = palette_file.string();
        j["policy_file"] = policy_file.string();
        j["appearance_db"] = appearance_db.string();
        j["font_dir"] = font_dir.string();
        j["output_dir"] = output_dir.string();
        auto paths = nlohmann::json::array();
        for (const auto& p : corpus_paths) paths.push_back(p.string());
        j["corpus"] = paths;
        auto paths2 = nlohmann::json::array();
        for (const auto& p : corpus_secondary_paths) paths2.push_back(p.string());
        j["corpus_secondary"] = paths2;
        j["corpus_mix"] = corpus_mix;
        j["granularity"] = granularity == Granularity::Word ? "word" : "line";
        j["max_instances_per_image"] = max_instances_per_image;
        j["seed"] = seed;
        j["count"] = count;
        j["debug_masks"] = debug_masks;
        j["retry_budget"] = retry_budget;
        j["placement"] = {{"aspect", placement.aspect},
                          {"min_height_px", placement.min_height_px},
                          {"max_height_frac", placement.max_height_frac},
                          {"coverage_min", placement.coverage_min},
                          {"min_region_area", placement.min_region_area}};
        return j;
    }

    static SynthConfig from_json(const nlohmann::json& j, const std::filesystem::path& base) {
        auto resolve = [&](const std::string& s) -> std::filesystem::path {
            std::filesystem::path p(s);
            return p.is_absolute() ? p : base / p;
        };
        SynthConfig c;
        try {
            c.backgrounds_dir = resolve(j.at("backgrounds_dir").get<std::string>());
            c.semantic_maps_dir = resolve(j.at("semantic_maps_dir").get<std::string>());
            c.policy_file = resolve(j.at("policy_file").get<std::string>());
            c.appearance_db = resolve(j.at("appearance_db").get<std::string>());
            c.font_dir = resolve(j.at("font_dir").get<std::string>());
            c.output_dir = resolve(j.at("output_dir").get<std::string>());
            for (const auto& p : j.at("corpus")) c.corpus_paths.push_back(resolve(p.get<std::string>()));
            if (j.contains("corpus_secondary"))
                for (const auto& p : j.at("corpus_secondary"))
                    c.corpus_secondary_paths.push_back(resolve(p.get<std::string>()));
            if (j.contains("palette_file"))
                c.palette_file = resolve(j.at("palette_file").get<std::string>());
            else
                c.palette_file = c.semantic_maps_dir / "palette.tsv";
            if (j.contains("corpus_langs"))
                for (const auto& s : j.at("corpus_langs")) c.corpus_langs.push_back(s.get<std::string>());
            if (j.contains("corpus_secondary_langs"))
                for (const auto& s : j.at("corpus_secondary_langs"))
                    c.corpus_secondary_langs.push_back(s.get<std::string>());
            if (j.contains("corpus_mix")) c.corpus_mix = j.at("corpus_mix").get<double>();
            if (j.contains("granularity"))
                c.granularity = granularity_from_string(j.at("granularity").get<std::string>());
            if (j.contains("max_instances_per_image"))
                c.max_instances_per_image = j.at("max_instances_per_image").get<int>();
            if (j.contains("seed")) c.seed = j.at("seed").get<uint64_t>();
            if (j.contains("count")) c.count = j.at("count").get<int>();
            if (j.contains("debug_masks")) c.debug_masks = j.at("debug_masks").get<bool>();
            if (j.contains("retry_budget")) c.retry_budget = j.at("retry_budget").get<int>();
            if (j.contains("placement")) {
                const auto& p = j.at("placement");
                if (p.contains("aspect")) c.placement.aspect = p.at("aspect").get<double>();
                if (p.contains("min_height_px"))
                    c.placement.min_height_px = p.at("min_height_px").get<int>();
                if (p.contains("max_height_frac"))
                    c.placement.max_height_frac = p.at("max_height_frac").get<double>();
                if (p.contains("coverage_min"))
                    c.placement.coverage_min = p.at("coverage_min").get<double>();
                if (p.contains("min_region_area"))
                    c.placement.min_region_area = p.at("min_region_area").get<int64_t>();
            }
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("bad config: ") + e.what());
        }
        c.validate();
        return c;
    }

    static SynthConfig load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file " + path.string());
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("invalid config JSON in " + path.string() + ": " + e.what());
        }
        return from_json(j, path.parent_path());
    }

    void validate() const {
        namespace fs = std::filesystem;
        if (max_instances_per_image < 1)
            throw ConfigError("max_instances_per_image must be >= 1");
        if (corpus_mix < 0 || corpus_mix > 1) throw ConfigError("corpus_mix must be in [0,1]");
        if (!fs::is_directory(backgrounds_dir))
            throw ConfigError("backgrounds_dir does not exist: " + backgrounds_dir.string());
        if (!fs::is_directory(semantic_maps_dir))
            throw ConfigError("semantic_maps_dir does not exist: " + semantic_maps_dir.string());
        if (!fs::exists(policy_file))
            throw ConfigError("policy_file does not exist: " + policy_file.string());
        if (!fs::exists(palette_file))
            throw ConfigError("palette_file does not exist: " + palette_file.string());
        if (!fs::exists(appearance_db))
            throw ConfigError("appearance_db does not exist: " + appearance_db.string());
        if (!fs::is_directory(font_dir))
            throw ConfigError("font_dir does not exist: " + font_dir.string());
        if (corpus_paths.empty()) throw ConfigError("corpus list is empty");
        for (const auto& p : corpus_paths)
            if (!fs::exists(p)) throw ConfigError("corpus file does not exist: " + p.string());
        for (const auto& p : corpus_secondary_paths)
            if (!fs::exists(p)) throw ConfigError("corpus file does not exist: " + p.string());
    }

    std::string hash() const {
        const std::string dump = to_json().dump();
        uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a 64
        for (unsigned char c : dump) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        std::ostringstream os;
        os << std::hex << std::setw(16) << std::setfill('0') << h;
        return os.str();
    }
};

struct ManifestInstance {
    std::string text;
    Quad quad;
    LabPixel color;
    std::string font_file;
    std::string font_style;
    std::string appearance_source;
};

struct ManifestSample {
    std::string id;
    std::string background_id;
    uint64_t seed = 0;
    std::string image_file;
    std::string gt_file;
    std::vector<ManifestInstance> instances;
};

/// Per-run ledger: everything needed to replay any sample byte-exactly
/// with the same engine version.
struct RunManifest {
    std::string engine_version = kEngineVersion;
    std::string config_hash;
    std::vector<ManifestSample> samples;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["engine_version"] = engine_version;
        j["config_hash"] = config_hash;
        auto arr = nlohmann::json::array();
        for (const auto& s : samples) {
            nlohmann::json js;
            js["id"] = s.id;
            js["background_id"] = s.background_id;
            js["seed"] = s.seed;
            js["image_file"] = s.image_file;
            js["gt_file"] = s.gt_file;
            auto insts = nlohmann::json::array();
            for (const auto& inst : s.instances) {
                nlohmann::json ji;
                ji["text"] = inst.text;
                auto q = nlohmann::json::array();
                for (const auto& p : inst.quad.pts) {
                    q.push_back(p.x);
                    q.push_back(p.y);
                }
                ji["quad"] = q;
                ji["color"] = {inst.color.L, inst.color.a, inst.color.b};
                ji["font_file"] = inst.font_file;
                ji["font_style"] = inst.font_style;
                ji["appearance_source"] = inst.appearance_source;
                insts.push_back(ji);
            }
            js["instances"] = insts;
            arr.push_back(js);
        }
        j["samples"] = arr;
        return j;
    }

    static RunManifest from_json(const nlohmann::json& j) {
        RunManifest m;
        try {
            m.engine_version = j.at("engine_version").get<std::string>();
            m.config_hash = j.at("config_hash").get<std::string>();
            for (const auto& js : j.at("samples")) {
                ManifestSample s;
                s.id = js.at("id").get<std::string>();
                s.background_id = js.at("background_id").get<std::string>();
                s.seed = js.at("seed").get<uint64_t>();
                s.image_file = js.at("image_file").get<std::string>();
                s.gt_file = js.at("gt_file").get<std::string>();
                for (const auto& ji : js.at("instances")) {
                    ManifestInstance inst;
                    inst.text = ji.at("text").get<std::string>();
                    const auto& q = ji.at("quad");
                    for (int i = 0; i < 4; ++i)
                        inst.quad.pts[i] = {q.at(2 * i).get<double>(), q.at(2 * i + 1).get<double>()};
                    inst.color.L = ji.at("color").at(0).get<float>();
                    inst.color.a = ji.at("color").at(1).get<float>();
                    inst.color.b = ji.at("color").at(2).get<float>();
                    inst.font_file = ji.at("font_file").get<std::string>();
                    inst.font_style = ji.at("font_style").get<std::string>();
                    inst.appearance_source = ji.at("appearance_source").get<std::string>();
                    s.instances.push_back(std::move(inst));
                }
                m.samples.push_back(std::move(s));
            }
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("bad manifest: ") + e.what());
        }
        return m;
    }

    void save(const std::filesystem::path& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot write " + path.string());
        out << to_json().dump(2) << '\n';
    }

    static RunManifest load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open manifest " + path.string());
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path.string() + ": " + e.what());
        }
        return from_json(j);
    }
};

/// Optional side-channel of intermediate maps for --debug-masks.
struct DebugArtifacts {
    SaliencyMap saliency;
    BinaryMask eligibility;
};

/// Loads all immutable inputs once and synthesizes samples. Safe to call
/// synthesize_one concurrently: shared state is read-only apart from the
/// internally locked font cache.
class Synthesizer {
public:
    struct BackgroundRef {
        std::filesystem::path image_path;
        std::filesystem::path map_path;
        std::string id;  // image file stem
    };

    explicit Synthesizer(const SynthConfig& cfg) : cfg_(cfg) {
        policy_ = SemanticPolicy::load(cfg.policy_file);
        palette_ = load_palette(cfg.palette_file);
        db_ = AppearanceDatabase::load(cfg.appearance_db);
        fonts_ = load_font_list(cfg.font_dir);
        corpus_ = load_corpus(cfg.corpus_paths, cfg.granularity, cfg.corpus_langs);
        if (corpus_.units.empty()) throw EmptyCorpus("primary corpus has no units");
        if (!cfg.corpus_secondary_paths.empty()) {
            corpus_secondary_ =
                load_corpus(cfg.corpus_secondary_paths, cfg.granularity, cfg.corpus_secondary_langs);
        }
        discover_backgrounds();
    }

    const std::vector<BackgroundRef>& backgrounds() const { return backgrounds_; }
    const SemanticPolicy& policy() const { return policy_; }
    const AppearanceDatabase& database() const { return db_; }
    const FontList& fonts() const { return fonts_; }
    const SynthConfig& config() const { return cfg_; }

    /// End-to-end synthesis of one sample. Returns nullopt when no
    /// placement fits (EmptySample: skipped, not fatal).
    std::optional<SynthesizedSample> synthesize_one(const BackgroundRef& bg, uint64_t seed,
                                                    DebugArtifacts* debug = nullptr) const {
        ImageU8 img = read_image(bg.image_path);
        if (img.channels == 1) {
            ImageU8 rgb(img.width, img.height, 3, Colorspace::Srgb8);
            for (size_t i = 0; i < img.pixel_count(); ++i)
                rgb.data[3 * i] = rgb.data[3 * i + 1] = rgb.data[3 * i + 2] = img.data[i];
            img = std::move(rgb);
        }
        SemanticMap map;
        map.labels = read_png_gray16(bg.map_path, map.width, map.height);
        map.palette = palette_;
        if (map.width != img.width || map.height != img.height)
            throw DimensionMismatch("semantic map size differs from background " + bg.id);
        for (uint16_t id : map.labels)
            if (!map.palette.count(id)) throw UnknownClassId(id);

        const BinaryMask sem = semantic_mask(map, policy_);
        const SaliencyMap sal = compute_saliency(img);
        const SaliencyMask sal_mask = low_saliency_mask(sal);
        EligibilityMask elig = combine_masks(sem, sal_mask, bg.id, bg.id);
        const GradientField grad = sobel_gradients(to_gray(img));
        if (debug) {
            debug->saliency = sal;
            debug->eligibility = elig.mask;
        }

        Rng rng(seed);
        const std::vector<PlacementCandidate> cands =
            find_placements(elig, sal, grad, cfg_.placement, rng);
        const std::vector<PlacementCandidate> picks =
            select_placements(cands, cfg_.max_instances_per_image, rng);

        SynthesizedSample sample;
        sample.seed = seed;
        sample.background_id = bg.id;
        sample.image = img;
        BinaryMask working = elig.mask;

        for (const PlacementCandidate& placement : picks) {
            // instances are carved out sequentially; re-verify coverage
            // against the working mask before committing to this placement
            const auto scan =
                placement_detail::scan_rotated_rect(placement.rect(), working, nullptr);
            if (scan.total == 0 ||
                scan.eligible < cfg_.placement.coverage_min * static_cast<double>(scan.total))
                continue;
            try {
                if (render_instance(sample, img, placement, rng))
                    carve(working, placement);
            } catch (const MissingGlyph&) {
                // corpus text the font cannot shape; skip this instance
                continue;
            }
        }
        if (sample.instances.empty()) return std::nullopt;
        return sample;
    }

private:
    void discover_backgrounds() {
        namespace fs = std::filesystem;
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(cfg_.backgrounds_dir))
            if (entry.is_regular_file() && is_image_file(entry.path()))
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            fs::path map = cfg_.semantic_maps_dir / (f.stem().string() + ".png");
            if (fs::exists(map)) backgrounds_.push_back({f, map, f.stem().string()});
        }
        if (backgrounds_.empty())
            throw ConfigError("no background/semantic-map pairs found under " +
                              cfg_.backgrounds_dir.string());
    }

    const TextCorpus& pick_pool(Rng& rng) const {
        if (corpus_secondary_.units.empty()) return corpus_;
        return rng.next_double() < cfg_.corpus_mix ? corpus_ : corpus_secondary_;
    }

    bool render_instance(SynthesizedSample& sample, const ImageU8& original,
                         const PlacementCandidate& placement, Rng& rng) const {
        const std::string text = sample_text(pick_pool(rng), rng);
        const FontEntry& font = pick_font(fonts_, rng);
        const auto face = font_cache_.get(font.file);

        // H_s: descriptor of the embedding location's background patch
        double bx0, by0, bx1, by1;
        placement.rect().bounds(bx0, by0, bx1, by1);
        RectI patch_rect{static_cast<int>(std::floor(bx0)), static_cast<int>(std::floor(by0)),
                         static_cast<int>(std::ceil(bx1 - bx0)),
                         static_cast<int>(std::ceil(by1 - by0))};
        patch_rect = patch_rect.clipped(original.width, original.height);
        ImageU8 patch(patch_rect.w, patch_rect.h, 3, Colorspace::Srgb8);
        for (int y = 0; y < patch_rect.h; ++y)
            for (int x = 0; x < patch_rect.w; ++x)
                for (int c = 0; c < 3; ++c)
                    patch.at(x, y, c) = original.at(patch_rect.x + x, patch_rect.y + y, c);
        const HogFeature h_s = extract_hog(patch);

        const auto neighbors = query_nearest(db_, h_s, 5);
        const auto& record = *neighbors[rng.bounded(neighbors.size())].first;
        const LabPixel color = sample_text_color(record, rng);

        TextLayout layout = rasterize_text(text, font, *face, placement.height);
        if (layout.empty()) return false;
        auto [composited, quad] = composite(sample.image, layout, color, placement);

        for (const auto& p : quad.pts)
            if (p.x < 0 || p.y < 0 || p.x > sample.image.width - 1 || p.y > sample.image.height - 1)
                return false;

        sample.image = std::move(composited);
        TextInstance inst;
        inst.layout = std::move(layout);
        inst.color = color;
        inst.placement = placement;
        inst.quad = quad;
        inst.appearance_source = record.source_id;
        sample.instances.push_back(std::move(inst));
        return true;
    }

    static void carve(BinaryMask& mask, const PlacementCandidate& placement) {
        RotatedRect r = placement.rect();
        r.w += 4;  // 2 px anti-alias dilation on every side
        r.h += 4;
        double bx0, by0, bx1, by1;
        r.bounds(bx0, by0, bx1, by1);
        const int x0 = std::max(0, static_cast<int>(std::floor(bx0)));
        const int y0 = std::max(0, static_cast<int>(std::floor(by0)));
        const int x1 = std::min(mask.width - 1, static_cast<int>(std::ceil(bx1)));
        const int y1 = std::min(mask.height - 1, static_cast<int>(std::ceil(by1)));
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x)
                if (r.contains(x + 0.5, y + 0.5)) mask.set(x, y, false);
    }

    SynthConfig cfg_;
    SemanticPolicy policy_;
    std::map<uint16_t, std::string> palette_;
    AppearanceDatabase db_;
    FontList fonts_;
    TextCorpus corpus_;
    TextCorpus corpus_secondary_;
    std::vector<BackgroundRef> backgrounds_;
    mutable FontCache font_cache_;
};

struct RunResult {
    int requested = 0;
    int produced = 0;
    RunManifest manifest;
    std::filesystem::path manifest_path;
    bool short_run() const { return produced < requested; }
};

namespace pipeline_detail {

inline std::string sample_name(int index) {
    std::ostringstream os;
    os << "img_" << std::setw(6) << std::setfill('0') << index;
    return os.str();
}

inline ImageU8 saliency_to_image(const SaliencyMap& sal) {
    ImageU8 img(sal.width, sal.height, 1, Colorspace::Gray);
    for (size_t i = 0; i < sal.values.size(); ++i)
        img.data[i] = static_cast<uint8_t>(std::clamp(std::lround(sal.values[i] * 255.f), 0L, 255L));
    return img;
}

inline ImageU8 mask_to_image(const BinaryMask& mask) {
    ImageU8 img(mask.width, mask.height, 1, Colorspace::Gray);
    for (size_t i = 0; i < mask.data.size(); ++i) img.data[i] = mask.data[i] ? 255 : 0;
    return img;
}

inline void draw_line(ImageU8& img, int x0, int y0, int x1, int y1,
                      uint8_t r, uint8_t g, uint8_t b) {
    const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
    const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    for (;;) {
        if (img.in_bounds(x0, y0)) {
            img.at(x0, y0, 0) = r;
            if (img.channels == 3) {
                img.at(x0, y0, 1) = g;
                img.at(x0, y0, 2) = b;
            }
        }
        if (x0 == x1 && y0 == y1) break;
        const int e2 = 2 * err;
        if (e2 >= dy) { err += dy; x0 += sx; }
        if (e2 <= dx) { err += dx; y0 += sy; }
    }
}

inline void draw_quad(ImageU8& img, const Quad& q, uint8_t r, uint8_t g, uint8_t b) {
    for (int i = 0; i < 4; ++i) {
        const auto& a = q.pts[i];
        const auto& c = q.pts[(i + 1) % 4];
        draw_line(img, static_cast<int>(std::lround(a.x)), static_cast<int>(std::lround(a.y)),
                  static_cast<int>(std::lround(c.x)), static_cast<int>(std::lround(c.y)), r, g, b);
    }
}

} // namespace pipeline_detail

/// Produce `config.count` non-empty samples, cycling backgrounds with
/// counter-derived per-sample seeds. Writes images, gt files and the
/// manifest under config.output_dir. Parallel workers produce exactly what
/// a sequential run would.
inline RunResult run_synth(const SynthConfig& config, int jobs = 1,
                           const std::function<void(const std::string&)>& log = {}) {
    namespace fs = std::filesystem;
    const Synthesizer synth(config);
    fs::create_directories(config.output_dir);

    RunResult result;
    result.requested = config.count;
    result.manifest.config_hash = config.hash();
    auto note = [&](const std::string& msg) { if (log) log(msg); };

    const auto& bgs = synth.backgrounds();
    const int64_t budget =
        static_cast<int64_t>(std::max<size_t>(config.count, bgs.size())) *
        std::max(1, config.retry_budget);
    jobs = std::max(1, jobs);

    struct Attempt {
        std::optional<SynthesizedSample> sample;
        DebugArtifacts debug;
        std::string error;
    };

    int64_t next_attempt = 0;
    while (result.produced < result.requested && next_attempt < budget) {
        const int wave = static_cast<int>(
            std::min<int64_t>(jobs, budget - next_attempt));
        std::vector<std::future<Attempt>> futures;
        futures.reserve(wave);
        for (int i = 0; i < wave; ++i) {
            const int64_t attempt = next_attempt + i;
            const auto& bg = bgs[attempt % bgs.size()];
            const uint64_t seed = derive_seed(config.seed, static_cast<uint64_t>(attempt));
            futures.push_back(std::async(std::launch::async, [&, bg, seed] {
                Attempt a;
                try {
                    a.sample = synth.synthesize_one(bg, seed, config.debug_masks ? &a.debug : nullptr);
                } catch (const Error& e) {
                    a.error = e.what();
                }
                return a;
            }));
        }
        for (int i = 0; i < wave && result.produced < result.requested; ++i) {
            Attempt a = futures[i].get();
            const int64_t attempt = next_attempt + i;
            if (!a.error.empty()) {
                note("attempt " + std::to_string(attempt) + " failed: " + a.error);
                continue;
            }
            if (!a.sample) {
                note("attempt " + std::to_string(attempt) + ": no placement fits (skipped)");
                continue;
            }
            const std::string name = pipeline_detail::sample_name(result.produced);
            ManifestSample ms;
            ms.id = name;
            ms.background_id = a.sample->background_id;
            ms.seed = a.sample->seed;
            ms.image_file = name + ".png";
            ms.gt_file = "gt_" + name + ".txt";
            write_png(config.output_dir / ms.image_file, a.sample->image);
            {
                std::ofstream gt(config.output_dir / ms.gt_file, std::ios::binary);
                if (!gt) throw IoError("cannot write gt file for " + name);
                gt << emit_annotations(*a.sample);
            }
            for (const TextInstance& inst : a.sample->instances) {
                ManifestInstance mi;
                mi.text = inst.layout.text;
                mi.quad = inst.quad;
                mi.color = inst.color;
                mi.font_file = inst.layout.font.file.string();
                mi.font_style = inst.layout.font.style;
                mi.appearance_source = inst.appearance_source;
                ms.instances.push_back(std::move(mi));
            }
            if (config.debug_masks) {
                write_png(config.output_dir / (name + "_saliency.png"),
                          pipeline_detail::saliency_to_image(a.debug.saliency));
                write_png(config.output_dir / (name + "_eligibility.png"),
                          pipeline_detail::mask_to_image(a.debug.eligibility));
                ImageU8 overlay = a.sample->image;
                for (const TextInstance& inst : a.sample->instances)
                    pipeline_detail::draw_quad(overlay, inst.quad, 0, 255, 0);
                write_png(config.output_dir / (name + "_overlay.png"), overlay);
            }
            result.manifest.samples.push_back(std::move(ms));
            ++result.produced;
        }
        // drain any futures left unread once the count was reached
        for (auto& f : futures)
            if (f.valid()) f.get();
        next_attempt += wave;
    }

    result.manifest_path = config.output_dir / "manifest.json";
    result.manifest.save(result.manifest_path);
    if (result.short_run())
        note("short run: produced " + std::to_string(result.produced) + " of " +
             std::to_string(result.requested));
    return result;
}

/// Contact-sheet overlay for one manifest sample: quad outlines plus the
/// transcript drawn above each instance.
inline void preview(const std::filesystem::path& manifest_path, const std::string& sample_id,
                    const std::filesystem::path& out_path) {
    const RunManifest manifest = RunManifest::load(manifest_path);
    const ManifestSample* found = nullptr;
    for (const auto& s : manifest.samples)
        if (s.id == sample_id) { found = &s; break; }
    if (!found) throw Error("sample " + sample_id + " not in manifest");

    const std::filesystem::path dir = manifest_path.parent_path();
    ImageU8 img = read_image(dir / found->image_file);
    FontCache cache;
    for (const auto& inst : found->instances) {
        pipeline_detail::draw_quad(img, inst.quad, 0, 255, 0);
        // transcript label above the quad's top-left corner
        try {
            const auto face = cache.get(inst.font_file);
            FontEntry entry{inst.font_file, ""};
            TextLayout label = rasterize_text(inst.text, entry, *face, 12.0);
            const int ox = static_cast<int>(std::lround(inst.quad.pts[0].x));
            const int oy = static_cast<int>(std::lround(inst.quad.pts[0].y)) -
                           label.alpha.height - 2;
            for (int y = 0; y < label.alpha.height; ++y) {
                for (int x = 0; x < label.alpha.width; ++x) {
                    if (label.alpha.at(x, y) <= 0.5f) continue;
                    const int px = ox + x, py = oy + y;
                    if (!img.in_bounds(px, py)) continue;
                    img.at(px, py, 0) = 0;
                    if (img.channels == 3) {
                        img.at(px, py, 1) = 255;
                        img.at(px, py, 2) = 0;
                    }
                }
            }
        } catch (const Error&) {
            // font unavailable at preview time; quads alone still help
        }
    }
    write_png(out_path, img);
}

} // namespace scenetext
