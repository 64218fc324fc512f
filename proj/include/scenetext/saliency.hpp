#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "scenetext/mask.hpp"
#include "scenetext/raster.hpp"

namespace scenetext {

/// Float saliency grid normalized to [0,1] with its cached global mean.
struct SaliencyMap {
    int width = 0;
    int height = 0;
    std::vector<float> values;
    float mean = 0.f;

    float at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
};

/// Low-saliency eligibility mask plus the threshold that produced it.
struct SaliencyMask {
    BinaryMask mask;
    float threshold = 0.f;
};

namespace saliency_detail {

// Histogram-contrast quantization: 12 bins per Lab channel over fixed
// nominal ranges, kept colors cover >= 95% of pixels.
inline constexpr int kBinsPerChannel = 12;
inline constexpr double kCoverage = 0.95;

inline int lab_bin(float L, float a, float b) {
    auto q = [](double v, double lo, double hi) {
        int bin = static_cast<int>((v - lo) / (hi - lo) * kBinsPerChannel);
        return std::clamp(bin, 0, kBinsPerChannel - 1);
    };
    return (q(L, 0.0, 100.0) * kBinsPerChannel + q(a, -128.0, 128.0)) * kBinsPerChannel +
           q(b, -128.0, 128.0);
}

struct Codebook {
    // parallel arrays over occupied bins, sorted by frequency descending
    std::vector<double> L, a, b;   // per-bin mean color
    std::vector<double> freq;      // fraction of image pixels
    std::vector<int> remap;        // bin id -> index into kept arrays
    int kept = 0;                  // first `kept` entries survive coverage cut
};

inline Codebook build_codebook(const ImageF32& lab) {
    const int nbins = kBinsPerChannel * kBinsPerChannel * kBinsPerChannel;
    std::vector<int64_t> count(nbins, 0);
    std::vector<double> sumL(nbins, 0), suma(nbins, 0), sumb(nbins, 0);
    const size_t n = lab.pixel_count();
    for (size_t i = 0; i < n; ++i) {
        float L = lab.data[3 * i], a = lab.data[3 * i + 1], b = lab.data[3 * i + 2];
        int bin = lab_bin(L, a, b);
        ++count[bin];
        sumL[bin] += L;
        suma[bin] += a;
        sumb[bin] += b;
    }
    std::vector<int> occupied;
    for (int i = 0; i < nbins; ++i)
        if (count[i] > 0) occupied.push_back(i);
    std::stable_sort(occupied.begin(), occupied.end(),
                     [&](int x, int y) { return count[x] > count[y]; });

    Codebook cb;
    cb.remap.assign(nbins, -1);
    int64_t cum = 0;
    const int64_t want = static_cast<int64_t>(std::ceil(kCoverage * static_cast<double>(n)));
    for (size_t k = 0; k < occupied.size(); ++k) {
        int bin = occupied[k];
        cb.L.push_back(sumL[bin] / count[bin]);
        cb.a.push_back(suma[bin] / count[bin]);
        cb.b.push_back(sumb[bin] / count[bin]);
        cb.freq.push_back(static_cast<double>(count[bin]) / static_cast<double>(n));
        cb.remap[bin] = static_cast<int>(k);
        if (cb.kept == 0) {
            cum += count[bin];
            if (cum >= want) cb.kept = static_cast<int>(k) + 1;
        }
    }
    if (cb.kept == 0) cb.kept = static_cast<int>(occupied.size());

    // remap dropped bins (and fold their mass) onto the nearest kept color
    for (size_t k = cb.kept; k < occupied.size(); ++k) {
        double bestd = std::numeric_limits<double>::max();
        int best = 0;
        for (int j = 0; j < cb.kept; ++j) {
            double dL = cb.L[k] - cb.L[j], da = cb.a[k] - cb.a[j], db = cb.b[k] - cb.b[j];
            double d = dL * dL + da * da + db * db;
            if (d < bestd) { bestd = d; best = j; }
        }
        cb.remap[occupied[k]] = best;
        cb.freq[best] += cb.freq[k];
    }
    return cb;
}

inline void gaussian_blur_inplace(std::vector<double>& v, int w, int h, double sigma) {
    if (sigma <= 0) return;
    const int radius = std::max(1, static_cast<int>(std::ceil(3 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    double ksum = 0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
        ksum += kernel[i + radius];
    }
    for (auto& k : kernel) k /= ksum;

    std::vector<double> tmp(v.size());
    for (int y = 0; y < h; ++y) {  // horizontal, replicate border
        for (int x = 0; x < w; ++x) {
            double acc = 0;
            for (int i = -radius; i <= radius; ++i) {
                int xx = std::clamp(x + i, 0, w - 1);
                acc += kernel[i + radius] * v[static_cast<size_t>(y) * w + xx];
            }
            tmp[static_cast<size_t>(y) * w + x] = acc;
        }
    }
    for (int y = 0; y < h; ++y) {  // vertical
        for (int x = 0; x < w; ++x) {
            double acc = 0;
            for (int i = -radius; i <= radius; ++i) {
                int yy = std::clamp(y + i, 0, h - 1);
                acc += kernel[i + radius] * tmp[static_cast<size_t>(yy) * w + x];
            }
            v[static_cast<size_t>(y) * w + x] = acc;
        }
    }
}

} // namespace saliency_detail

/// Per-pixel global color contrast, pre-smoothing and pre-normalization:
/// saliency of color c is sum_j f_j * ||c - c_j||_2 over the kept codebook.
/// Exposed separately so debugging and fixtures can see the raw stage.
inline std::vector<double> saliency_contrast_raw(const ImageU8& img) {
    using namespace saliency_detail;
    ImageF32 lab = srgb_to_lab(img);
    Codebook cb = build_codebook(lab);

    std::vector<double> per_color(cb.kept, 0.0);
    for (int k = 0; k < cb.kept; ++k) {
        double s = 0;
        for (int j = 0; j < cb.kept; ++j) {
            if (j == k) continue;
            double dL = cb.L[k] - cb.L[j], da = cb.a[k] - cb.a[j], db = cb.b[k] - cb.b[j];
            s += cb.freq[j] * std::sqrt(dL * dL + da * da + db * db);
        }
        per_color[k] = s;
    }

    std::vector<double> out(img.pixel_count());
    const size_t n = out.size();
    for (size_t i = 0; i < n; ++i) {
        int bin = lab_bin(lab.data[3 * i], lab.data[3 * i + 1], lab.data[3 * i + 2]);
        out[i] = per_color[cb.remap[bin]];
    }
    return out;
}

/// Histogram-contrast saliency: raw color contrast, Gaussian-smoothed with
/// sigma = 2% of the image diagonal, min-max normalized to [0,1]. A
/// single-color image yields an all-zero map.
inline SaliencyMap compute_saliency(const ImageU8& img) {
    if (img.channels != 3)
        throw InvalidChannelCount("compute_saliency expects a 3-channel image");
    std::vector<double> v = saliency_contrast_raw(img);
    const double diag = std::sqrt(static_cast<double>(img.width) * img.width +
                                  static_cast<double>(img.height) * img.height);
    saliency_detail::gaussian_blur_inplace(v, img.width, img.height, 0.02 * diag);

    auto [mn_it, mx_it] = std::minmax_element(v.begin(), v.end());
    const double mn = *mn_it, mx = *mx_it;
    SaliencyMap map;
    map.width = img.width;
    map.height = img.height;
    map.values.resize(v.size());
    double sum = 0;
    if (mx - mn < 1e-12) {
        std::fill(map.values.begin(), map.values.end(), 0.f);
    } else {
        for (size_t i = 0; i < v.size(); ++i) {
            double nv = (v[i] - mn) / (mx - mn);
            map.values[i] = static_cast<float>(nv);
            sum += nv;
        }
    }
    map.mean = static_cast<float>(sum / static_cast<double>(v.size()));
    return map;
}

/// Threshold at the map's own mean; <= keeps a perfectly homogeneous image
/// fully eligible.
inline SaliencyMask low_saliency_mask(const SaliencyMap& s) {
    SaliencyMask out;
    out.threshold = s.mean;
    out.mask = BinaryMask(s.width, s.height);
    for (size_t i = 0; i < s.values.size(); ++i)
        out.mask.data[i] = s.values[i] <= out.threshold ? 1 : 0;
    return out;
}

} // namespace scenetext
