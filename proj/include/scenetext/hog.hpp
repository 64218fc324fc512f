#pragma once

#include <array>
#include <cmath>
#include <cstring>

#include "scenetext/raster.hpp"

namespace scenetext {

// Fixed parameterization: 32x32 gray patch, 8x8-px cells (4x4 grid),
// 9 unsigned orientation bins, 2x2-cell blocks at stride 1 (3x3 blocks),
// L2-Hys normalization. 3*3 blocks * 4 cells * 9 bins = 324 entries.
inline constexpr int kHogPatch = 32;
inline constexpr int kHogCell = 8;
inline constexpr int kHogCellsPerSide = kHogPatch / kHogCell;      // 4
inline constexpr int kHogBins = 9;
inline constexpr int kHogBlocksPerSide = kHogCellsPerSide - 1;     // 3
inline constexpr int kHogBlockLen = 4 * kHogBins;                  // 36
inline constexpr int kHogDim = kHogBlocksPerSide * kHogBlocksPerSide * kHogBlockLen;  // 324
inline constexpr float kHogEps = 1e-6f;
inline constexpr float kHogClip = 0.2f;

/// Identifies the descriptor layout; stored in database files so stale
/// indexes built with other parameters are rejected at load.
inline constexpr const char* kHogVersionTag = "hog/32x32-c8-b9-l2hys-1";

struct HogFeature {
    std::array<float, kHogDim> v{};

    double distance_sq(const HogFeature& o) const {
        double d = 0;
        for (int i = 0; i < kHogDim; ++i) {
            double diff = static_cast<double>(v[i]) - o.v[i];
            d += diff * diff;
        }
        return d;
    }
};

/// HoG descriptor of an arbitrary gray patch (resized to 32x32 first).
/// Gradients are central differences with replicate borders; each pixel
/// votes its magnitude into the single bin holding its orientation.
inline HogFeature extract_hog(const ImageF32& patch) {
    if (patch.channels != 1)
        throw InvalidChannelCount("extract_hog expects a single-channel patch");
    if (patch.pixel_count() < 64)
        throw ImageTooSmall("extract_hog needs patch area >= 64 px^2");
    const ImageF32 p = (patch.width == kHogPatch && patch.height == kHogPatch)
                           ? patch
                           : resize_bilinear(patch, kHogPatch, kHogPatch);

    float cells[kHogCellsPerSide][kHogCellsPerSide][kHogBins] = {};
    auto pix = [&](int x, int y) {
        x = std::clamp(x, 0, kHogPatch - 1);
        y = std::clamp(y, 0, kHogPatch - 1);
        return p.data[static_cast<size_t>(y) * kHogPatch + x];
    };
    for (int y = 0; y < kHogPatch; ++y) {
        for (int x = 0; x < kHogPatch; ++x) {
            float gx = pix(x + 1, y) - pix(x - 1, y);
            float gy = pix(x, y + 1) - pix(x, y - 1);
            float mag = std::sqrt(gx * gx + gy * gy);
            if (mag == 0.f) continue;
            float ang = std::atan2(gy, gx);
            if (ang < 0.f) ang += static_cast<float>(M_PI);
            if (ang >= static_cast<float>(M_PI)) ang -= static_cast<float>(M_PI);
            int bin = std::min(kHogBins - 1,
                               static_cast<int>(ang * kHogBins / static_cast<float>(M_PI)));
            cells[y / kHogCell][x / kHogCell][bin] += mag;
        }
    }

    HogFeature f;
    int out = 0;
    for (int by = 0; by < kHogBlocksPerSide; ++by) {
        for (int bx = 0; bx < kHogBlocksPerSide; ++bx) {
            float block[kHogBlockLen];
            int k = 0;
            for (int cy = by; cy < by + 2; ++cy)
                for (int cx = bx; cx < bx + 2; ++cx)
                    for (int b = 0; b < kHogBins; ++b) block[k++] = cells[cy][cx][b];
            // L2-Hys: normalize, clip at 0.2, renormalize
            double norm = 0;
            for (float v : block) norm += static_cast<double>(v) * v;
            float inv = 1.f / std::sqrt(static_cast<float>(norm) + kHogEps * kHogEps);
            for (float& v : block) v = std::min(v * inv, kHogClip);
            norm = 0;
            for (float v : block) norm += static_cast<double>(v) * v;
            inv = 1.f / std::sqrt(static_cast<float>(norm) + kHogEps * kHogEps);
            for (float v : block) f.v[out++] = v * inv;
        }
    }
    return f;
}

inline HogFeature extract_hog(const ImageU8& patch) { return extract_hog(to_gray(patch)); }

} // namespace scenetext
