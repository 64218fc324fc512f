#pragma once

#include <cstdint>
#include <vector>

#include "scenetext/errors.hpp"

namespace scenetext {

/// H x W boolean grid; true = eligible pixel.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> data;  // 0 or 1

    BinaryMask() = default;
    BinaryMask(int w, int h, bool fill = false)
        : width(w), height(h), data(static_cast<size_t>(w) * h, fill ? 1 : 0) {}

    bool test(int x, int y) const { return data[static_cast<size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { data[static_cast<size_t>(y) * width + x] = v ? 1 : 0; }
    size_t size() const { return data.size(); }
    bool same_size(const BinaryMask& o) const { return width == o.width && height == o.height; }

    int64_t count_true() const {
        int64_t n = 0;
        for (uint8_t v : data) n += v;
        return n;
    }
};

/// Summed-area table over a BinaryMask; O(1) rectangle population counts.
struct IntegralTable {
    int width = 0;
    int height = 0;
    std::vector<int64_t> sums;  // (width+1) x (height+1), row-major

    static IntegralTable build(const BinaryMask& mask) {
        IntegralTable t;
        t.width = mask.width;
        t.height = mask.height;
        t.sums.assign(static_cast<size_t>(mask.width + 1) * (mask.height + 1), 0);
        const int w = mask.width;
        for (int y = 0; y < mask.height; ++y) {
            int64_t row = 0;
            for (int x = 0; x < w; ++x) {
                row += mask.data[static_cast<size_t>(y) * w + x];
                t.sums[static_cast<size_t>(y + 1) * (w + 1) + (x + 1)] =
                    t.sums[static_cast<size_t>(y) * (w + 1) + (x + 1)] + row;
            }
        }
        return t;
    }

    /// Count of true pixels in the half-open rectangle [x0,x0+w) x [y0,y0+h).
    int64_t rect_sum(int x0, int y0, int w, int h) const {
        const int s = width + 1;
        return sums[static_cast<size_t>(y0 + h) * s + (x0 + w)] -
               sums[static_cast<size_t>(y0) * s + (x0 + w)] -
               sums[static_cast<size_t>(y0 + h) * s + x0] +
               sums[static_cast<size_t>(y0) * s + x0];
    }
};

inline BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b) {
    if (!a.same_size(b)) throw DimensionMismatch("mask AND: sizes differ");
    BinaryMask out(a.width, a.height);
    for (size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i] & b.data[i];
    return out;
}

} // namespace scenetext
