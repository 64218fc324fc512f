#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scenetext/annotation.hpp"
#include "scenetext/errors.hpp"
#include "scenetext/fonts.hpp"
#include "scenetext/hog.hpp"
#include "scenetext/image_io.hpp"
#include "scenetext/raster.hpp"
#include "scenetext/rng.hpp"

namespace scenetext {

/// One database pair: HoG of the background around a real text box and
/// the Lab statistics of the text pixels inside it.
struct AppearanceRecord {
    HogFeature h_b;
    float mu_L = 0, sigma_L = 0;
    float mu_a = 0, sigma_a = 0;
    float mu_b = 0, sigma_b = 0;
    std::string source_id;
};

struct AppearanceDatabase {
    std::string version_tag = kHogVersionTag;
    std::vector<AppearanceRecord> records;

    void save(const std::filesystem::path& path) const;
    static AppearanceDatabase load(const std::filesystem::path& path);
};

namespace appearance_detail {

/// Otsu threshold over L values binned into 256 buckets spanning [0,100].
inline float otsu_threshold_L(const std::vector<float>& values) {
    constexpr int kBins = 256;
    int64_t hist[kBins] = {};
    for (float v : values) {
        int bin = std::clamp(static_cast<int>(v / 100.f * kBins), 0, kBins - 1);
        ++hist[bin];
    }
    const double total = static_cast<double>(values.size());
    double sum_all = 0;
    for (int i = 0; i < kBins; ++i) sum_all += static_cast<double>(i) * hist[i];
    double sum_b = 0, w_b = 0, best_var = -1;
    int best_bin = kBins / 2;
    for (int t = 0; t < kBins; ++t) {
        w_b += hist[t];
        if (w_b == 0) continue;
        const double w_f = total - w_b;
        if (w_f == 0) break;
        sum_b += static_cast<double>(t) * hist[t];
        const double m_b = sum_b / w_b;
        const double m_f = (sum_all - sum_b) / w_f;
        const double var = w_b * w_f * (m_b - m_f) * (m_b - m_f);
        if (var > best_var) {
            best_var = var;
            best_bin = t;
        }
    }
    // upper edge of the winning bin: every value histogrammed at or below
    // best_bin classifies low under a strict < comparison
    return (best_bin + 1.0f) * 100.f / kBins;
}

struct MomentAcc {
    double sum = 0, sum_sq = 0;
    int64_t n = 0;
    void add(double v) { sum += v; sum_sq += v * v; ++n; }
    double mean() const { return n ? sum / n : 0; }
    double stddev() const {
        if (!n) return 0;
        const double m = mean();
        return std::sqrt(std::max(0.0, sum_sq / n - m * m));
    }
};

} // namespace appearance_detail

/// Build one Eq-pair record from a crop and a text box inside it. The HoG
/// descriptor sees the ring of background around the box (box interior
/// flattened to the ring mean); the Lab statistics cover the segmented
/// text pixels inside the box.
inline AppearanceRecord build_record(const ImageU8& crop, RectI box,
                                     const std::string& source_id = {}) {
    if (crop.channels != 3) throw InvalidChannelCount("build_record expects 3-channel crop");
    RectI img{0, 0, crop.width, crop.height};
    if (!img.contains(box) || box.empty())
        throw Error("annotation box must lie inside the crop");

    const int ring_w = std::max(4, static_cast<int>(std::lround(0.5 * box.h)));
    RectI ring_rect = box.expanded(ring_w).clipped(crop.width, crop.height);
    if (ring_rect.w <= box.w && ring_rect.h <= box.h)
        throw NoBackgroundRing("box touches every border; no background ring around it");

    // ring mean color (u8 domain) and mean L
    double ring_sum[3] = {0, 0, 0};
    appearance_detail::MomentAcc ring_L;
    int64_t ring_n = 0;
    for (int y = ring_rect.y; y < ring_rect.y1(); ++y) {
        for (int x = ring_rect.x; x < ring_rect.x1(); ++x) {
            const bool inside_box = x >= box.x && x < box.x1() && y >= box.y && y < box.y1();
            if (inside_box) continue;
            for (int c = 0; c < 3; ++c) ring_sum[c] += crop.at(x, y, c);
            ring_L.add(lab_from_srgb(crop.at(x, y, 0), crop.at(x, y, 1), crop.at(x, y, 2)).L);
            ++ring_n;
        }
    }
    if (ring_n == 0) throw NoBackgroundRing("background ring is empty");
    uint8_t ring_mean[3];
    for (int c = 0; c < 3; ++c)
        ring_mean[c] = static_cast<uint8_t>(std::lround(ring_sum[c] / ring_n));

    // HoG patch: ring bounding rect with the box interior masked to the
    // ring mean so the descriptor captures only the surroundings
    ImageU8 patch(ring_rect.w, ring_rect.h, 3, Colorspace::Srgb8);
    for (int y = 0; y < ring_rect.h; ++y) {
        for (int x = 0; x < ring_rect.w; ++x) {
            const int sx = ring_rect.x + x, sy = ring_rect.y + y;
            const bool inside_box =
                sx >= box.x && sx < box.x1() && sy >= box.y && sy < box.y1();
            for (int c = 0; c < 3; ++c)
                patch.at(x, y, c) = inside_box ? ring_mean[c] : crop.at(sx, sy, c);
        }
    }

    // segment text pixels inside the box: Otsu on L; the text cluster is
    // the one whose mean L sits farther from the ring mean L (minority
    // cluster when the distances nearly tie)
    std::vector<LabPixel> box_lab;
    std::vector<float> box_L;
    box_lab.reserve(static_cast<size_t>(box.w) * box.h);
    for (int y = box.y; y < box.y1(); ++y) {
        for (int x = box.x; x < box.x1(); ++x) {
            LabPixel p = lab_from_srgb(crop.at(x, y, 0), crop.at(x, y, 1), crop.at(x, y, 2));
            box_lab.push_back(p);
            box_L.push_back(p.L);
        }
    }
    const float thr = appearance_detail::otsu_threshold_L(box_L);
    appearance_detail::MomentAcc lo_L, hi_L;
    for (float v : box_L) (v < thr ? lo_L : hi_L).add(v);
    const double ring_mean_L = ring_L.mean();
    bool text_is_hi;
    const double d_lo = std::abs(lo_L.mean() - ring_mean_L);
    const double d_hi = std::abs(hi_L.mean() - ring_mean_L);
    if (std::abs(d_lo - d_hi) < 2.0)
        text_is_hi = hi_L.n < lo_L.n;  // fallback: minority cluster
    else
        text_is_hi = d_hi > d_lo;

    appearance_detail::MomentAcc mL, ma, mb;
    for (size_t i = 0; i < box_lab.size(); ++i) {
        const bool hi = box_L[i] >= thr;
        if (hi != text_is_hi) continue;
        mL.add(box_lab[i].L);
        ma.add(box_lab[i].a);
        mb.add(box_lab[i].b);
    }
    if (mL.n < 10)
        throw SegmentationFailed("fewer than 10 text pixels segmented in " + source_id);

    AppearanceRecord rec;
    rec.h_b = extract_hog(patch);
    rec.mu_L = static_cast<float>(mL.mean());
    rec.sigma_L = static_cast<float>(mL.stddev());
    rec.mu_a = static_cast<float>(ma.mean());
    rec.sigma_a = static_cast<float>(ma.stddev());
    rec.mu_b = static_cast<float>(mb.mean());
    rec.sigma_b = static_cast<float>(mb.stddev());
    rec.source_id = source_id;
    return rec;
}

/// Walk a dataset laid out as image files plus per-image ground truth
/// ("gt_<stem>.txt" or "<stem>.txt") and build one record per parseable
/// annotation. Failures are reported through `log` and skipped.
inline AppearanceDatabase build_database(const std::filesystem::path& root, GtFormat format,
                                         const std::function<void(const std::string&)>& log = {}) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root)) throw ConfigError("dataset root does not exist: " + root.string());
    auto note = [&](const std::string& msg) { if (log) log(msg); };

    std::vector<fs::path> images;
    for (const auto& entry : fs::recursive_directory_iterator(root))
        if (entry.is_regular_file() && is_image_file(entry.path())) images.push_back(entry.path());
    std::sort(images.begin(), images.end());

    AppearanceDatabase db;
    for (const auto& img_path : images) {
        fs::path gt = img_path.parent_path() / ("gt_" + img_path.stem().string() + ".txt");
        if (!fs::exists(gt)) gt = img_path.parent_path() / (img_path.stem().string() + ".txt");
        if (!fs::exists(gt)) continue;

        ImageU8 img;
        std::vector<QuadAnnotation> anns;
        try {
            img = read_image(img_path);
            std::ifstream in(gt, std::ios::binary);
            std::string content((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
            anns = parse_ground_truth(content, format);
        } catch (const Error& e) {
            note(std::string("skip ") + img_path.string() + ": " + e.what());
            continue;
        }
        if (img.channels == 1) {
            ImageU8 rgb(img.width, img.height, 3, Colorspace::Srgb8);
            for (size_t i = 0; i < img.pixel_count(); ++i)
                rgb.data[3 * i] = rgb.data[3 * i + 1] = rgb.data[3 * i + 2] = img.data[i];
            img = std::move(rgb);
        }

        for (size_t ai = 0; ai < anns.size(); ++ai) {
            const auto& ann = anns[ai];
            if (ann.transcript == "###") continue;  // don't-care marker
            double x0 = ann.quad.pts[0].x, y0 = ann.quad.pts[0].y, x1 = x0, y1 = y0;
            for (const auto& p : ann.quad.pts) {
                x0 = std::min(x0, p.x); y0 = std::min(y0, p.y);
                x1 = std::max(x1, p.x); y1 = std::max(y1, p.y);
            }
            RectI box{static_cast<int>(std::lround(x0)), static_cast<int>(std::lround(y0)),
                      static_cast<int>(std::lround(x1 - x0)), static_cast<int>(std::lround(y1 - y0))};
            box = box.clipped(img.width, img.height);
            const std::string source_id =
                img_path.stem().string() + "#" + std::to_string(ai);
            try {
                db.records.push_back(build_record(img, box, source_id));
            } catch (const Error& e) {
                note("skip " + source_id + ": " + e.what());
            }
        }
    }
    if (db.records.empty()) throw EmptyDatabase("no usable annotations under " + root.string());
    std::sort(db.records.begin(), db.records.end(),
              [](const AppearanceRecord& a, const AppearanceRecord& b) {
                  return a.source_id < b.source_id;
              });
    return db;
}

/// Exact k-nearest records by Euclidean HoG distance, ascending; ties
/// broken by source_id. k is clamped to the database size.
inline std::vector<std::pair<const AppearanceRecord*, double>>
query_nearest(const AppearanceDatabase& db, const HogFeature& h_s, int k) {
    if (db.records.empty()) throw EmptyDatabase("appearance database is empty");
    if (k < 1) throw Error("query_nearest requires k >= 1");
    std::vector<std::pair<const AppearanceRecord*, double>> all;
    all.reserve(db.records.size());
    for (const auto& rec : db.records) all.emplace_back(&rec, rec.h_b.distance_sq(h_s));
    const size_t kk = std::min(static_cast<size_t>(k), all.size());
    std::partial_sort(all.begin(), all.begin() + kk, all.end(),
                      [](const auto& a, const auto& b) {
                          if (a.second != b.second) return a.second < b.second;
                          return a.first->source_id < b.first->source_id;
                      });
    all.resize(kk);
    for (auto& [rec, d] : all) d = std::sqrt(d);
    return all;
}

/// Channelwise mu + u*sigma with u ~ Uniform(-1,1); L clamped to [0,100].
inline LabPixel sample_text_color(const AppearanceRecord& rec, Rng& rng) {
    LabPixel p;
    p.L = std::clamp(rec.mu_L + static_cast<float>(rng.uniform(-1, 1)) * rec.sigma_L, 0.f, 100.f);
    p.a = rec.mu_a + static_cast<float>(rng.uniform(-1, 1)) * rec.sigma_a;
    p.b = rec.mu_b + static_cast<float>(rng.uniform(-1, 1)) * rec.sigma_b;
    return p;
}

// --- serialization: line-delimited JSON, one header line then one record
// per line; floats stored as doubles so the round trip is bit-exact ---

inline void AppearanceDatabase::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    nlohmann::json header{{"format", "appearance-db"}, {"version", version_tag},
                          {"count", records.size()}};
    out << header.dump() << '\n';
    for (const auto& rec : records) {
        nlohmann::json j;
        j["source_id"] = rec.source_id;
        j["mu_L"] = static_cast<double>(rec.mu_L);
        j["sigma_L"] = static_cast<double>(rec.sigma_L);
        j["mu_a"] = static_cast<double>(rec.mu_a);
        j["sigma_a"] = static_cast<double>(rec.sigma_a);
        j["mu_b"] = static_cast<double>(rec.mu_b);
        j["sigma_b"] = static_cast<double>(rec.sigma_b);
        auto& h = j["h_b"] = nlohmann::json::array();
        for (float v : rec.h_b.v) h.push_back(static_cast<double>(v));
        out << j.dump() << '\n';
    }
    if (!out) throw IoError("failed writing " + path.string());
}

inline AppearanceDatabase AppearanceDatabase::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path.string() + ": empty database file");
    AppearanceDatabase db;
    try {
        nlohmann::json header = nlohmann::json::parse(line);
        if (header.at("format") != "appearance-db")
            throw ParseError(path.string() + ": not an appearance database");
        db.version_tag = header.at("version").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": bad header: " + e.what());
    }
    if (db.version_tag != kHogVersionTag)
        throw StaleDatabase(path.string() + ": built with descriptor " + db.version_tag +
                            ", engine expects " + kHogVersionTag);
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            nlohmann::json j = nlohmann::json::parse(line);
            AppearanceRecord rec;
            rec.source_id = j.at("source_id").get<std::string>();
            rec.mu_L = static_cast<float>(j.at("mu_L").get<double>());
            rec.sigma_L = static_cast<float>(j.at("sigma_L").get<double>());
            rec.mu_a = static_cast<float>(j.at("mu_a").get<double>());
            rec.sigma_a = static_cast<float>(j.at("sigma_a").get<double>());
            rec.mu_b = static_cast<float>(j.at("mu_b").get<double>());
            rec.sigma_b = static_cast<float>(j.at("sigma_b").get<double>());
            const auto& h = j.at("h_b");
            if (h.size() != kHogDim)
                throw ParseError("h_b has " + std::to_string(h.size()) + " entries");
            for (int i = 0; i < kHogDim; ++i)
                rec.h_b.v[i] = static_cast<float>(h[i].get<double>());
            db.records.push_back(std::move(rec));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (db.records.empty()) throw EmptyDatabase(path.string() + ": no records");
    return db;
}

} // namespace scenetext
