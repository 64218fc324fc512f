#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace scenetext {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// Integer rectangle, half-open is not implied: covers pixels
/// [x, x+w) x [y, y+h).
struct RectI {
    int x = 0, y = 0, w = 0, h = 0;

    int x1() const { return x + w; }
    int y1() const { return y + h; }
    bool empty() const { return w <= 0 || h <= 0; }
    int64_t area() const { return static_cast<int64_t>(w) * h; }
    bool contains(const RectI& inner) const {
        return inner.x >= x && inner.y >= y && inner.x1() <= x1() && inner.y1() <= y1();
    }
    RectI clipped(int img_w, int img_h) const {
        int nx0 = std::max(x, 0), ny0 = std::max(y, 0);
        int nx1 = std::min(x1(), img_w), ny1 = std::min(y1(), img_h);
        return {nx0, ny0, std::max(0, nx1 - nx0), std::max(0, ny1 - ny0)};
    }
    RectI expanded(int m) const { return {x - m, y - m, w + 2 * m, h + 2 * m}; }
};

/// Quadrilateral corners, clockwise from top-left (image coords, y down).
struct Quad {
    std::array<Vec2, 4> pts{};
};

/// Rectangle of size w x h centered at (cx, cy), rotated by theta radians.
/// Image coordinates: x right, y down; positive theta rotates the +x axis
/// toward +y (visually clockwise-down on screen).
struct RotatedRect {
    double cx = 0, cy = 0, w = 0, h = 0, theta = 0;

    Quad corners() const {
        const double c = std::cos(theta), s = std::sin(theta);
        auto map = [&](double dx, double dy) {
            return Vec2{cx + c * dx - s * dy, cy + s * dx + c * dy};
        };
        Quad q;
        q.pts[0] = map(-w / 2, -h / 2);
        q.pts[1] = map(+w / 2, -h / 2);
        q.pts[2] = map(+w / 2, +h / 2);
        q.pts[3] = map(-w / 2, +h / 2);
        return q;
    }

    bool contains(double px, double py) const {
        const double c = std::cos(theta), s = std::sin(theta);
        const double dx = px - cx, dy = py - cy;
        const double u = c * dx + s * dy;   // inverse rotation
        const double v = -s * dx + c * dy;
        return std::abs(u) <= w / 2 && std::abs(v) <= h / 2;
    }

    /// Axis-aligned bounds of the rotated corners.
    void bounds(double& x0, double& y0, double& x1, double& y1) const {
        Quad q = corners();
        x0 = y0 = std::numeric_limits<double>::max();
        x1 = y1 = std::numeric_limits<double>::lowest();
        for (const auto& p : q.pts) {
            x0 = std::min(x0, p.x);
            y0 = std::min(y0, p.y);
            x1 = std::max(x1, p.x);
            y1 = std::max(y1, p.y);
        }
    }
};

inline double polygon_area(const std::vector<Vec2>& poly) {
    double a = 0;
    const size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % n];
        a += p.x * q.y - q.x * p.y;
    }
    return std::abs(a) / 2.0;
}

/// Sutherland-Hodgman clip of a convex subject polygon by a convex clip
/// polygon. Both wound consistently (clockwise in y-down coords).
inline std::vector<Vec2> clip_convex(std::vector<Vec2> subject, const std::vector<Vec2>& clip) {
    auto inside = [](const Vec2& p, const Vec2& a, const Vec2& b) {
        // clockwise winding in y-down coords keeps the interior on the left
        // of each directed edge in cross-product terms below
        return (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x) >= 0;
    };
    auto intersect = [](const Vec2& p, const Vec2& q, const Vec2& a, const Vec2& b) {
        const double a1 = q.y - p.y, b1 = p.x - q.x, c1 = a1 * p.x + b1 * p.y;
        const double a2 = b.y - a.y, b2 = a.x - b.x, c2 = a2 * a.x + b2 * a.y;
        const double det = a1 * b2 - a2 * b1;
        if (std::abs(det) < 1e-12) return p;
        return Vec2{(b2 * c1 - b1 * c2) / det, (a1 * c2 - a2 * c1) / det};
    };
    const size_t n = clip.size();
    for (size_t i = 0; i < n && !subject.empty(); ++i) {
        const Vec2& a = clip[i];
        const Vec2& b = clip[(i + 1) % n];
        std::vector<Vec2> out;
        const size_t m = subject.size();
        for (size_t j = 0; j < m; ++j) {
            const Vec2& p = subject[j];
            const Vec2& q = subject[(j + 1) % m];
            const bool pin = inside(p, a, b), qin = inside(q, a, b);
            if (pin) {
                out.push_back(p);
                if (!qin) out.push_back(intersect(p, q, a, b));
            } else if (qin) {
                out.push_back(intersect(p, q, a, b));
            }
        }
        subject = std::move(out);
    }
    return subject;
}

inline double quad_intersection_area(const Quad& a, const Quad& b) {
    std::vector<Vec2> pa(a.pts.begin(), a.pts.end());
    std::vector<Vec2> pb(b.pts.begin(), b.pts.end());
    auto inter = clip_convex(pa, pb);
    return inter.size() < 3 ? 0.0 : polygon_area(inter);
}

inline double quad_iou(const Quad& a, const Quad& b) {
    std::vector<Vec2> pa(a.pts.begin(), a.pts.end());
    std::vector<Vec2> pb(b.pts.begin(), b.pts.end());
    const double ia = quad_intersection_area(a, b);
    const double ua = polygon_area(pa) + polygon_area(pb) - ia;
    return ua <= 0 ? 0.0 : ia / ua;
}

} // namespace scenetext
