#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "scenetext/annotation.hpp"
#include "scenetext/errors.hpp"
#include "scenetext/fonts.hpp"
#include "scenetext/geometry.hpp"
#include "scenetext/placement.hpp"
#include "scenetext/raster.hpp"
#include "scenetext/truetype.hpp"
#include "scenetext/utf8.hpp"

namespace scenetext {

/// Rasterized text: anti-aliased glyph coverage plus its tight ink box.
struct TextLayout {
    std::string text;
    FontEntry font;
    double px_height = 0;      // requested cap height in pixels
    ImageF32 alpha;            // coverage in [0,1]
    RectI ink_box;             // tight bounds of alpha > 0
    bool empty() const { return ink_box.empty(); }
};

namespace rendering_detail {

inline std::string trim_copy(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n\f\v");
    if (b == std::string::npos) return {};
    size_t e = s.find_last_not_of(" \t\r\n\f\v");
    return s.substr(b, e - b + 1);
}

inline RectI tight_ink_box(const ImageF32& alpha) {
    int x0 = alpha.width, y0 = alpha.height, x1 = -1, y1 = -1;
    for (int y = 0; y < alpha.height; ++y) {
        for (int x = 0; x < alpha.width; ++x) {
            if (alpha.at(x, y) > 0.f) {
                x0 = std::min(x0, x);
                y0 = std::min(y0, y);
                x1 = std::max(x1, x);
                y1 = std::max(y1, y);
            }
        }
    }
    if (x1 < x0) return {};
    return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

} // namespace rendering_detail

/// Rasterize a text string at the requested cap height. Left-to-right
/// advance-width layout, kerning off, anti-aliased.
inline TextLayout rasterize_text(const std::string& text, const FontEntry& entry,
                                 const FontFace& face, double px_height) {
    const std::string trimmed = rendering_detail::trim_copy(text);
    if (trimmed.empty()) throw EmptyText("text is empty after trimming");
    if (px_height < 8) throw Error("px_height must be >= 8");

    std::vector<char32_t> cps;
    size_t bad = 0;
    if (!decode_utf8(trimmed, cps, &bad)) throw EncodingError("<text>", bad);

    const double scale = px_height / face.cap_height();
    std::vector<LineEdge> edges;
    double pen_x = 0;
    for (char32_t cp : cps) {
        const uint16_t gid = face.glyph_index(cp);
        if (gid == 0) throw MissingGlyph(cp);
        face.append_glyph_edges(gid, scale, pen_x, 0.0, edges);
        pen_x += face.advance_width(gid) * scale;
    }

    TextLayout layout;
    layout.text = trimmed;
    layout.font = entry;
    layout.px_height = px_height;
    if (edges.empty()) {  // e.g. whitespace-only glyph outlines
        layout.alpha = ImageF32(1, 1, 1, Colorspace::Gray, 0.f);
        layout.ink_box = {};
        return layout;
    }

    float ex0 = edges[0].x0, ey0 = edges[0].y0, ex1 = ex0, ey1 = ey0;
    for (const LineEdge& e : edges) {
        ex0 = std::min({ex0, e.x0, e.x1});
        ey0 = std::min({ey0, e.y0, e.y1});
        ex1 = std::max({ex1, e.x0, e.x1});
        ey1 = std::max({ey1, e.y0, e.y1});
    }
    constexpr int kPad = 2;
    const float ox = kPad - ex0, oy = kPad - ey0;
    for (LineEdge& e : edges) {
        e.x0 += ox;
        e.x1 += ox;
        e.y0 += oy;
        e.y1 += oy;
    }
    const int cw = static_cast<int>(std::ceil(ex1 - ex0)) + 2 * kPad;
    const int ch = static_cast<int>(std::ceil(ey1 - ey0)) + 2 * kPad;
    layout.alpha = rasterize_coverage(edges, cw, ch);
    layout.ink_box = rendering_detail::tight_ink_box(layout.alpha);
    return layout;
}

inline TextLayout rasterize_text(const std::string& text, const FontEntry& entry,
                                 double px_height) {
    const FontFace face = FontFace::load(entry.file);
    return rasterize_text(text, entry, face, px_height);
}

/// Scale-to-fit the layout's ink into the placement box (5% padding,
/// centered), rotate by the placement's theta, color in Lab and
/// alpha-blend over the background in linear RGB. Returns the modified
/// image and the tight rotated quad of the placed ink.
inline std::pair<ImageU8, Quad> composite(const ImageU8& background, const TextLayout& layout,
                                          const LabPixel& color,
                                          const PlacementCandidate& placement) {
    if (background.channels != 3)
        throw InvalidChannelCount("composite expects a 3-channel background");
    if (layout.empty()) throw Error("composite: layout has no ink");

    const double iw = layout.ink_box.w, ih = layout.ink_box.h;
    const double s = 0.95 * std::min(placement.width / iw, placement.height / ih);
    const double icx = layout.ink_box.x + iw / 2.0;
    const double icy = layout.ink_box.y + ih / 2.0;
    const double ct = std::cos(placement.theta), st = std::sin(placement.theta);

    // forward map: alpha coords -> image coords
    auto fwd = [&](double ax, double ay) {
        const double dx = (ax - icx) * s, dy = (ay - icy) * s;
        return Vec2{placement.cx + ct * dx - st * dy, placement.cy + st * dx + ct * dy};
    };
    Quad quad;
    quad.pts[0] = fwd(layout.ink_box.x, layout.ink_box.y);
    quad.pts[1] = fwd(layout.ink_box.x1(), layout.ink_box.y);
    quad.pts[2] = fwd(layout.ink_box.x1(), layout.ink_box.y1());
    quad.pts[3] = fwd(layout.ink_box.x, layout.ink_box.y1());

    double bx0 = quad.pts[0].x, by0 = quad.pts[0].y, bx1 = bx0, by1 = by0;
    for (const auto& p : quad.pts) {
        bx0 = std::min(bx0, p.x);
        by0 = std::min(by0, p.y);
        bx1 = std::max(bx1, p.x);
        by1 = std::max(by1, p.y);
    }
    const int px0 = std::max(0, static_cast<int>(std::floor(bx0)) - 1);
    const int py0 = std::max(0, static_cast<int>(std::floor(by0)) - 1);
    const int px1 = std::min(background.width - 1, static_cast<int>(std::ceil(bx1)) + 1);
    const int py1 = std::min(background.height - 1, static_cast<int>(std::ceil(by1)) + 1);

    const auto text_lin = linear_rgb_from_lab(color);
    const auto& lut = detail::srgb_decode_lut();

    ImageU8 out = background;
    const ImageF32& alpha = layout.alpha;
    for (int y = py0; y <= py1; ++y) {
        for (int x = px0; x <= px1; ++x) {
            // inverse map of the pixel center into alpha pixel-index space
            const double dx = (x + 0.5) - placement.cx;
            const double dy = (y + 0.5) - placement.cy;
            const double ax = icx + (ct * dx + st * dy) / s - 0.5;
            const double ay = icy + (-st * dx + ct * dy) / s - 0.5;
            if (ax < -1 || ay < -1 || ax > alpha.width || ay > alpha.height) continue;
            const int ix = static_cast<int>(std::floor(ax));
            const int iy = static_cast<int>(std::floor(ay));
            const double fx = ax - ix, fy = ay - iy;
            auto sample = [&](int sx, int sy) -> double {
                if (sx < 0 || sy < 0 || sx >= alpha.width || sy >= alpha.height) return 0.0;
                return alpha.at(sx, sy);
            };
            const double a = (1 - fy) * ((1 - fx) * sample(ix, iy) + fx * sample(ix + 1, iy)) +
                             fy * ((1 - fx) * sample(ix, iy + 1) + fx * sample(ix + 1, iy + 1));
            if (a <= 0.0) continue;
            for (int c = 0; c < 3; ++c) {
                const double bg = lut[out.at(x, y, c)];
                const double v = a * text_lin[c] + (1 - a) * bg;
                out.at(x, y, c) = static_cast<uint8_t>(
                    std::clamp(std::lround(detail::srgb_encode(v) * 255.0), 0L, 255L));
            }
        }
    }
    return {std::move(out), quad};
}

/// One composited text instance and its provenance.
struct TextInstance {
    TextLayout layout;
    LabPixel color;
    PlacementCandidate placement;
    Quad quad;                  // tight rotated ink quad, clockwise from top-left
    std::string appearance_source;  // source_id of the database record used
};

struct SynthesizedSample {
    ImageU8 image;
    std::vector<TextInstance> instances;
    uint64_t seed = 0;
    std::string background_id;
};

/// Ground-truth lines: "x1,y1,x2,y2,x3,y3,x4,y4,transcript", LF endings.
inline std::string emit_annotations(const SynthesizedSample& sample) {
    std::string out;
    for (const TextInstance& inst : sample.instances) {
        out += format_annotation_line(inst.quad, inst.layout.text);
        out += '\n';
    }
    return out;
}

} // namespace scenetext
