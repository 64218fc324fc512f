#pragma once

// Independent reference implementations used only by tests. Each oracle is
// written straight-line from the definition it checks, without reusing the
// library's computation path.

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <vector>

#include "scenetext/hog.hpp"
#include "scenetext/mask.hpp"
#include "scenetext/raster.hpp"

namespace oracles {

/// Brute-force count of true pixels in [x0,x0+w) x [y0,y0+h).
inline int64_t rect_count(const scenetext::BinaryMask& mask, int x0, int y0, int w, int h) {
    int64_t n = 0;
    for (int y = y0; y < y0 + h; ++y)
        for (int x = x0; x < x0 + w; ++x)
            if (mask.test(x, y)) ++n;
    return n;
}

/// BFS flood fill labeling with 4-connectivity; returns label grid
/// (-1 background) and per-label areas.
inline std::vector<int> flood_fill_4(const scenetext::BinaryMask& mask,
                                     std::vector<int64_t>& areas) {
    const int w = mask.width, h = mask.height;
    std::vector<int> labels(static_cast<size_t>(w) * h, -1);
    areas.clear();
    for (int sy = 0; sy < h; ++sy) {
        for (int sx = 0; sx < w; ++sx) {
            if (!mask.test(sx, sy) || labels[static_cast<size_t>(sy) * w + sx] != -1) continue;
            const int id = static_cast<int>(areas.size());
            areas.push_back(0);
            std::queue<std::pair<int, int>> q;
            q.push({sx, sy});
            labels[static_cast<size_t>(sy) * w + sx] = id;
            while (!q.empty()) {
                auto [x, y] = q.front();
                q.pop();
                ++areas[id];
                const int nx[4] = {x - 1, x + 1, x, x};
                const int ny[4] = {y, y, y - 1, y + 1};
                for (int k = 0; k < 4; ++k) {
                    if (nx[k] < 0 || ny[k] < 0 || nx[k] >= w || ny[k] >= h) continue;
                    auto& l = labels[static_cast<size_t>(ny[k]) * w + nx[k]];
                    if (mask.test(nx[k], ny[k]) && l == -1) {
                        l = id;
                        q.push({nx[k], ny[k]});
                    }
                }
            }
        }
    }
    return labels;
}

/// Brute-force global color contrast without quantization: for every pixel,
/// sum frequency-weighted Lab distances over all distinct image colors.
inline std::vector<double> contrast_saliency(const scenetext::ImageU8& img) {
    const scenetext::ImageF32 lab = scenetext::srgb_to_lab(img);
    struct Color { float L, a, b; };
    std::map<uint32_t, std::pair<Color, int64_t>> colors;  // keyed by packed rgb
    const size_t n = img.pixel_count();
    for (size_t i = 0; i < n; ++i) {
        const uint32_t key = (img.data[3 * i] << 16) | (img.data[3 * i + 1] << 8) |
                             img.data[3 * i + 2];
        auto [it, fresh] = colors.try_emplace(
            key, Color{lab.data[3 * i], lab.data[3 * i + 1], lab.data[3 * i + 2]}, 0);
        ++it->second.second;
        (void)fresh;
    }
    std::vector<double> out(n);
    for (size_t i = 0; i < n; ++i) {
        const double L = lab.data[3 * i], a = lab.data[3 * i + 1], b = lab.data[3 * i + 2];
        double s = 0;
        for (const auto& [key, entry] : colors) {
            const auto& [c, cnt] = entry;
            const double dL = L - c.L, da = a - c.a, db = b - c.b;
            s += (static_cast<double>(cnt) / static_cast<double>(n)) *
                 std::sqrt(dL * dL + da * da + db * db);
        }
        out[i] = s;
    }
    return out;
}

/// Straight-line HoG with the engine's pinned parameters, written from the
/// definition: 32x32 gray input (caller resizes), central differences with
/// replicate borders, hard 9-bin assignment over [0,pi), 2x2-cell blocks,
/// L2-Hys with eps=1e-6 and clip 0.2.
inline std::vector<float> reference_hog_32(const std::vector<float>& gray /*32*32*/) {
    const int N = 32, CELL = 8, BINS = 9;
    auto px = [&](int x, int y) {
        x = std::max(0, std::min(31, x));
        y = std::max(0, std::min(31, y));
        return gray[static_cast<size_t>(y) * N + x];
    };
    double cells[4][4][9] = {};
    for (int y = 0; y < N; ++y) {
        for (int x = 0; x < N; ++x) {
            const double gx = px(x + 1, y) - px(x - 1, y);
            const double gy = px(x, y + 1) - px(x, y - 1);
            const double mag = std::sqrt(gx * gx + gy * gy);
            if (mag == 0) continue;
            double ang = std::atan2(gy, gx);
            if (ang < 0) ang += M_PI;
            if (ang >= M_PI) ang -= M_PI;
            int bin = static_cast<int>(ang * BINS / M_PI);
            if (bin > BINS - 1) bin = BINS - 1;
            cells[y / CELL][x / CELL][bin] += mag;
        }
    }
    std::vector<float> out;
    for (int by = 0; by < 3; ++by) {
        for (int bx = 0; bx < 3; ++bx) {
            float block[36];
            int k = 0;
            for (int cy = by; cy < by + 2; ++cy)
                for (int cx = bx; cx < bx + 2; ++cx)
                    for (int b = 0; b < BINS; ++b)
                        block[k++] = static_cast<float>(cells[cy][cx][b]);
            double norm = 0;
            for (float v : block) norm += static_cast<double>(v) * v;
            float inv = 1.f / std::sqrt(static_cast<float>(norm) + 1e-6f * 1e-6f);
            for (float& v : block) v = std::min(v * inv, 0.2f);
            norm = 0;
            for (float v : block) norm += static_cast<double>(v) * v;
            inv = 1.f / std::sqrt(static_cast<float>(norm) + 1e-6f * 1e-6f);
            for (float v : block) out.push_back(v * inv);
        }
    }
    return out;
}

} // namespace oracles
