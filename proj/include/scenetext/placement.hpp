#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "scenetext/geometry.hpp"
#include "scenetext/mask.hpp"
#include "scenetext/raster.hpp"
#include "scenetext/rng.hpp"
#include "scenetext/saliency.hpp"
#include "scenetext/semantics.hpp"

namespace scenetext {

/// Legal support for placements: semantic AND low-saliency.
struct EligibilityMask {
    BinaryMask mask;
    std::string semantic_id;
    std::string saliency_id;
};

inline EligibilityMask combine_masks(const BinaryMask& sem, const SaliencyMask& sal,
                                     std::string semantic_id = {}, std::string saliency_id = {}) {
    if (!sem.same_size(sal.mask))
        throw DimensionMismatch("combine_masks: semantic and saliency masks differ in size");
    EligibilityMask out;
    out.mask = mask_and(sem, sal.mask);
    out.semantic_id = std::move(semantic_id);
    out.saliency_id = std::move(saliency_id);
    return out;
}

struct OrientationEstimate {
    double theta = 0;      // text-baseline angle, radians in (-pi/4, pi/4]
    double coherence = 0;  // (l1-l2)/(l1+l2), 0 for structureless windows
};

namespace placement_detail {

/// Baseline angle from accumulated structure-tensor moments. The dominant
/// gradient direction is the tensor's major eigenvector; the structure
/// (edge) runs perpendicular to it. Folded with period pi/2 into
/// (-pi/4, pi/4]: text reads horizontally, so structures steeper than 45
/// degrees align text with their perpendicular instead.
inline OrientationEstimate orientation_from_moments(double sxx, double syy, double sxy) {
    OrientationEstimate est;
    const double trace = sxx + syy;
    const double diff = sxx - syy;
    const double det = std::sqrt(diff * diff + 4 * sxy * sxy);
    est.coherence = trace > 1e-12 ? det / (trace + 1e-12) : 0.0;
    if (est.coherence <= 0) return est;
    const double grad_angle = 0.5 * std::atan2(2 * sxy, diff);  // dominant gradient dir
    double edge = grad_angle + M_PI / 2;                         // structure runs across it
    edge -= M_PI / 2 * std::round(edge / (M_PI / 2));            // fold into (-pi/4, pi/4]
    if (edge <= -M_PI / 4) edge += M_PI / 2;
    est.theta = edge;
    return est;
}

/// Integral tables of the structure tensor products for O(1) window sums.
struct TensorIntegral {
    int width = 0, height = 0;
    std::vector<double> xx, yy, xy;  // (w+1)*(h+1)

    static TensorIntegral build(const GradientField& g) {
        TensorIntegral t;
        t.width = g.width();
        t.height = g.height();
        const int w = t.width, h = t.height;
        const size_t stride = static_cast<size_t>(w) + 1;
        t.xx.assign(stride * (h + 1), 0);
        t.yy.assign(stride * (h + 1), 0);
        t.xy.assign(stride * (h + 1), 0);
        for (int y = 0; y < h; ++y) {
            double rxx = 0, ryy = 0, rxy = 0;
            for (int x = 0; x < w; ++x) {
                const size_t i = static_cast<size_t>(y) * w + x;
                const double gx = g.gx.data[i], gy = g.gy.data[i];
                rxx += gx * gx;
                ryy += gy * gy;
                rxy += gx * gy;
                const size_t o = (static_cast<size_t>(y) + 1) * stride + x + 1;
                const size_t up = static_cast<size_t>(y) * stride + x + 1;
                t.xx[o] = t.xx[up] + rxx;
                t.yy[o] = t.yy[up] + ryy;
                t.xy[o] = t.xy[up] + rxy;
            }
        }
        return t;
    }

    void window_sums(RectI r, double& sxx, double& syy, double& sxy) const {
        const size_t stride = static_cast<size_t>(width) + 1;
        auto rect = [&](const std::vector<double>& v) {
            return v[(static_cast<size_t>(r.y1())) * stride + r.x1()] -
                   v[(static_cast<size_t>(r.y)) * stride + r.x1()] -
                   v[(static_cast<size_t>(r.y1())) * stride + r.x] +
                   v[(static_cast<size_t>(r.y)) * stride + r.x];
        };
        sxx = rect(xx);
        syy = rect(yy);
        sxy = rect(xy);
    }
};

/// Exact scan of a rotated rectangle against the eligibility mask: counts
/// pixel centers inside the rect, how many are eligible, and accumulates
/// their saliency. Row spans are derived analytically from the rect edges.
struct RotatedScan {
    int64_t total = 0;
    int64_t eligible = 0;
    double saliency_sum = 0;
    bool in_bounds = true;
};

/// Pixel-center x range of a horizontal scanline through a convex quad:
/// returns false when the line misses it.
inline bool quad_row_span(const Quad& q, double py, int width, int& x_first, int& x_last) {
    double sx0 = 0, sx1 = 0;
    int crossings = 0;
    for (int i = 0; i < 4; ++i) {
        const Vec2& a = q.pts[i];
        const Vec2& b = q.pts[(i + 1) % 4];
        const double ylo = std::min(a.y, b.y), yhi = std::max(a.y, b.y);
        if (py < ylo || py >= yhi) continue;  // half-open: vertices count once
        const double x = a.x + (py - a.y) * (b.x - a.x) / (b.y - a.y);
        if (crossings == 0) {
            sx0 = sx1 = x;
        } else {
            sx0 = std::min(sx0, x);
            sx1 = std::max(sx1, x);
        }
        ++crossings;
    }
    if (crossings < 2) return false;
    // pixel centers x+0.5 within [sx0, sx1]
    x_first = std::max(0, static_cast<int>(std::ceil(sx0 - 0.5)));
    x_last = std::min(width - 1, static_cast<int>(std::floor(sx1 - 0.5)));
    return x_first <= x_last;
}

inline RotatedScan scan_rotated_rect(const RotatedRect& rect, const BinaryMask& mask,
                                     const SaliencyMap* sal) {
    RotatedScan r;
    double bx0, by0, bx1, by1;
    rect.bounds(bx0, by0, bx1, by1);
    if (bx0 < 0 || by0 < 0 || bx1 > mask.width || by1 > mask.height) r.in_bounds = false;
    const Quad q = rect.corners();
    const int y0 = std::max(0, static_cast<int>(std::floor(by0)));
    const int y1 = std::min(mask.height - 1, static_cast<int>(std::ceil(by1)));
    for (int y = y0; y <= y1; ++y) {
        int xa, xb;
        if (!quad_row_span(q, y + 0.5, mask.width, xa, xb)) continue;
        r.total += xb - xa + 1;
        const size_t row = static_cast<size_t>(y) * mask.width;
        for (int x = xa; x <= xb; ++x)
            if (mask.data[row + x]) ++r.eligible;
        if (sal)
            for (int x = xa; x <= xb; ++x) r.saliency_sum += sal->values[row + x];
    }
    return r;
}

/// Row-prefix sums over the mask and saliency grid: rotated-rect coverage
/// and score queries in O(height) per candidate.
struct RowPrefixTables {
    int width = 0, height = 0;
    std::vector<int32_t> mask;  // (width+1) per row, prefix counts
    std::vector<double> sal;    // (width+1) per row, prefix sums

    static RowPrefixTables build(const BinaryMask& m, const SaliencyMap& s) {
        RowPrefixTables t;
        t.width = m.width;
        t.height = m.height;
        const size_t stride = static_cast<size_t>(m.width) + 1;
        t.mask.assign(stride * m.height, 0);
        t.sal.assign(stride * m.height, 0.0);
        for (int y = 0; y < m.height; ++y) {
            int32_t mc = 0;
            double sc = 0;
            const size_t row = static_cast<size_t>(y) * m.width;
            const size_t prow = static_cast<size_t>(y) * stride;
            for (int x = 0; x < m.width; ++x) {
                mc += m.data[row + x];
                sc += s.values[row + x];
                t.mask[prow + x + 1] = mc;
                t.sal[prow + x + 1] = sc;
            }
        }
        return t;
    }

    RotatedScan scan(const RotatedRect& rect) const {
        RotatedScan r;
        double bx0, by0, bx1, by1;
        rect.bounds(bx0, by0, bx1, by1);
        if (bx0 < 0 || by0 < 0 || bx1 > width || by1 > height) {
            r.in_bounds = false;
            return r;
        }
        const Quad q = rect.corners();
        const size_t stride = static_cast<size_t>(width) + 1;
        const int y0 = std::max(0, static_cast<int>(std::floor(by0)));
        const int y1 = std::min(height - 1, static_cast<int>(std::ceil(by1)));
        for (int y = y0; y <= y1; ++y) {
            int xa, xb;
            if (!quad_row_span(q, y + 0.5, width, xa, xb)) continue;
            const size_t prow = static_cast<size_t>(y) * stride;
            r.total += xb - xa + 1;
            r.eligible += t_mask(prow, xb + 1) - t_mask(prow, xa);
            r.saliency_sum += sal[prow + xb + 1] - sal[prow + xa];
        }
        return r;
    }

private:
    int32_t t_mask(size_t prow, int x) const { return mask[prow + x]; }
};

} // namespace placement_detail

/// Dominant structure orientation inside a window of the gradient field.
inline OrientationEstimate estimate_orientation(const GradientField& grad, RectI window) {
    window = window.clipped(grad.width(), grad.height());
    double sxx = 0, syy = 0, sxy = 0;
    for (int y = window.y; y < window.y1(); ++y) {
        for (int x = window.x; x < window.x1(); ++x) {
            const size_t i = static_cast<size_t>(y) * grad.width() + x;
            const double gx = grad.gx.data[i], gy = grad.gy.data[i];
            sxx += gx * gx;
            syy += gy * gy;
            sxy += gx * gy;
        }
    }
    return placement_detail::orientation_from_moments(sxx, syy, sxy);
}

/// One candidate text box: rotated rectangle plus its saliency score
/// (mean saliency inside, lower preferred).
struct PlacementCandidate {
    double cx = 0, cy = 0;
    double width = 0, height = 0;
    double theta = 0;
    int region_id = 0;
    float score = 0;

    RotatedRect rect() const { return {cx, cy, width, height, theta}; }
    Quad corners() const { return rect().corners(); }
};

struct PlacementParams {
    double aspect = 4.0;            // box width / height
    int min_height_px = 16;
    double max_height_frac = 0.8;   // of the region bbox short side
    double ladder_factor = 1.26;
    double coverage_min = 0.98;
    double coherence_gate = 0.3;
    double jitter_deg = 3.0;        // fallback orientation jitter
    double iou_max = 0.05;
    int64_t min_region_area = 32 * 32;
};

/// Grid search over each eligible region: geometric height ladder, stride
/// height/4, integral-table coverage pretest, structure-tensor orientation,
/// exact rotated re-verification, then greedy dedup ascending by score.
inline std::vector<PlacementCandidate> find_placements(const EligibilityMask& elig,
                                                       const SaliencyMap& saliency,
                                                       const GradientField& grad,
                                                       const PlacementParams& params,
                                                       Rng& rng) {
    using namespace placement_detail;
    const BinaryMask& mask = elig.mask;
    const int W = mask.width, H = mask.height;
    std::vector<PlacementCandidate> candidates;
    if (W == 0 || H == 0) return candidates;

    const RegionLabeling regions = connected_regions(mask, params.min_region_area);
    if (regions.components.empty()) return candidates;
    const IntegralTable integral = IntegralTable::build(mask);
    const TensorIntegral tensor = TensorIntegral::build(grad);
    const RowPrefixTables prefix = RowPrefixTables::build(mask, saliency);

    for (const RegionComponent& region : regions.components) {
        const int short_side = std::min(region.bbox.w, region.bbox.h);
        const int max_h = static_cast<int>(params.max_height_frac * short_side);
        for (double hf = params.min_height_px; static_cast<int>(hf) <= max_h;
             hf *= params.ladder_factor) {
            const int h = static_cast<int>(hf);
            const int w = static_cast<int>(std::lround(h * params.aspect));
            if (w > region.bbox.w || w > W || h > H) continue;
            const int stride = std::max(1, h / 4);
            for (int y = region.bbox.y; y + h <= region.bbox.y1(); y += stride) {
                for (int x = region.bbox.x; x + w <= region.bbox.x1(); x += stride) {
                    const int64_t inside = integral.rect_sum(x, y, w, h);
                    if (inside < params.coverage_min * static_cast<double>(w) * h) continue;

                    // orientation from the surroundings: window twice the box
                    RectI window{x - w / 2, y - h / 2, 2 * w, 2 * h};
                    window = window.clipped(W, H);
                    double sxx, syy, sxy;
                    tensor.window_sums(window, sxx, syy, sxy);
                    OrientationEstimate est = orientation_from_moments(sxx, syy, sxy);
                    double theta;
                    if (est.coherence >= params.coherence_gate)
                        theta = est.theta;
                    else
                        theta = rng.uniform(-params.jitter_deg, params.jitter_deg) * M_PI / 180.0;

                    PlacementCandidate cand;
                    cand.cx = x + w / 2.0;
                    cand.cy = y + h / 2.0;
                    cand.width = w;
                    cand.height = h;
                    cand.theta = theta;
                    cand.region_id = region.id;

                    RotatedScan scan = prefix.scan(cand.rect());
                    if (!scan.in_bounds || scan.total == 0) continue;
                    if (scan.eligible < params.coverage_min * static_cast<double>(scan.total))
                        continue;
                    cand.score = static_cast<float>(scan.saliency_sum / scan.total);
                    candidates.push_back(cand);
                }
            }
        }
    }

    std::sort(candidates.begin(), candidates.end(),
              [](const PlacementCandidate& a, const PlacementCandidate& b) {
                  if (a.score != b.score) return a.score < b.score;
                  if (a.region_id != b.region_id) return a.region_id < b.region_id;
                  if (a.cy != b.cy) return a.cy < b.cy;
                  if (a.cx != b.cx) return a.cx < b.cx;
                  return a.height < b.height;
              });

    // greedy non-overlap dedup in score order; cheap bbox reject before
    // the polygon clip
    struct Accepted {
        Quad quad;
        double x0, y0, x1, y1;
    };
    std::vector<PlacementCandidate> accepted;
    std::vector<Accepted> kept;
    for (const PlacementCandidate& cand : candidates) {
        const RotatedRect rect = cand.rect();
        Accepted a;
        a.quad = rect.corners();
        rect.bounds(a.x0, a.y0, a.x1, a.y1);
        bool overlaps = false;
        for (const Accepted& other : kept) {
            if (a.x1 <= other.x0 || other.x1 <= a.x0 || a.y1 <= other.y0 || other.y1 <= a.y0)
                continue;
            if (quad_iou(a.quad, other.quad) >= params.iou_max) {
                overlaps = true;
                break;
            }
        }
        if (!overlaps) {
            accepted.push_back(cand);
            kept.push_back(a);
        }
    }
    return accepted;
}

/// Weighted sample without replacement favoring low scores
/// (weight = exp(-score/tau), tau = 0.2); deterministic under the seed.
inline std::vector<PlacementCandidate> select_placements(std::vector<PlacementCandidate> cands,
                                                         int max_count, Rng& rng,
                                                         double tau = 0.2) {
    std::vector<PlacementCandidate> out;
    const int n = static_cast<int>(std::min<size_t>(cands.size(), std::max(0, max_count)));
    std::vector<double> weights(cands.size());
    for (size_t i = 0; i < cands.size(); ++i) weights[i] = std::exp(-cands[i].score / tau);
    for (int k = 0; k < n; ++k) {
        double total = 0;
        for (double w : weights) total += w;
        double u = rng.next_double() * total;
        size_t pick = 0;
        for (size_t i = 0; i < weights.size(); ++i) {
            u -= weights[i];
            if (u <= 0) { pick = i; break; }
            pick = i;  // numeric tail: fall through to the last entry
        }
        out.push_back(cands[pick]);
        cands.erase(cands.begin() + pick);
        weights.erase(weights.begin() + pick);
    }
    return out;
}

} // namespace scenetext
