#pragma once

// Minimal TrueType loader and scanline rasterizer. Parses the tables this
// engine needs (cmap 4/12, head, hhea, hmtx, maxp, loca, glyf, OS/2),
// flattens quadratic outlines to line edges and rasterizes anti-aliased
// coverage with the nonzero winding rule. No hinting, no kerning.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "scenetext/errors.hpp"
#include "scenetext/raster.hpp"

namespace scenetext {

/// Directed line segment in pixel coordinates (y down); direction carries
/// the winding sign.
struct LineEdge {
    float x0, y0, x1, y1;
};

class FontFace {
public:
    static FontFace load(const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open font file " + path.string());
        std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
        return from_bytes(std::move(bytes), path.string());
    }

    static FontFace from_bytes(std::vector<uint8_t> bytes, std::string name) {
        FontFace f;
        f.data_ = std::move(bytes);
        f.name_ = std::move(name);
        f.parse();
        return f;
    }

    const std::string& name() const { return name_; }
    int units_per_em() const { return units_per_em_; }
    double ascent() const { return ascent_; }
    double descent() const { return descent_; }
    uint16_t glyph_count() const { return num_glyphs_; }

    /// Height of capital letters in font units: OS/2 sCapHeight when the
    /// table carries it, else the 'H' outline bbox, else 0.7 em.
    double cap_height() const { return cap_height_; }

    /// Glyph id for a codepoint; 0 (.notdef) when unmapped.
    uint16_t glyph_index(char32_t cp) const {
        if (cmap_format_ == 4) return lookup_cmap4(cp);
        return lookup_cmap12(cp);
    }
    bool has_glyph(char32_t cp) const { return glyph_index(cp) != 0; }

    /// Advance width in font units.
    double advance_width(uint16_t gid) const {
        uint16_t i = std::min(gid, static_cast<uint16_t>(num_hmetrics_ - 1));
        return read_u16(hmtx_ + 4 * static_cast<uint32_t>(i));
    }

    /// Appends the glyph outline, flattened to line edges, positioned with
    /// its origin at (origin_x, baseline_y) and scaled by `scale` px/unit.
    /// The y axis is flipped into image convention (y down).
    void append_glyph_edges(uint16_t gid, double scale, double origin_x, double baseline_y,
                            std::vector<LineEdge>& edges) const {
        Xform root{1, 0, 0, 1, 0, 0};
        append_outline(gid, root, 0, scale, origin_x, baseline_y, edges);
    }

    /// Tight outline bounds (font units) straight from the glyf header;
    /// zero-size for empty glyphs.
    bool glyph_bbox(uint16_t gid, double& x0, double& y0, double& x1, double& y1) const {
        uint32_t off, len;
        if (!glyph_range(gid, off, len) || len == 0) return false;
        x0 = read_i16(off + 2);
        y0 = read_i16(off + 4);
        x1 = read_i16(off + 6);
        y1 = read_i16(off + 8);
        return true;
    }

private:
    struct Xform {
        double a, b, c, d, dx, dy;  // [a b; c d] * p + (dx, dy), font units
    };

    std::vector<uint8_t> data_;
    std::string name_;
    uint32_t cmap_sub_ = 0;   // offset of the chosen cmap subtable
    int cmap_format_ = 0;
    uint32_t loca_ = 0, glyf_ = 0, hmtx_ = 0;
    uint32_t glyf_len_ = 0;
    int loca_long_ = 0;
    uint16_t num_glyphs_ = 0, num_hmetrics_ = 0;
    int units_per_em_ = 0;
    double ascent_ = 0, descent_ = 0, cap_height_ = 0;

    // --- bounds-checked big-endian reads ---
    uint8_t read_u8(uint32_t off) const {
        if (off >= data_.size()) throw ParseError(name_ + ": truncated font data");
        return data_[off];
    }
    uint16_t read_u16(uint32_t off) const {
        if (off + 2 > data_.size()) throw ParseError(name_ + ": truncated font data");
        return static_cast<uint16_t>((data_[off] << 8) | data_[off + 1]);
    }
    int16_t read_i16(uint32_t off) const { return static_cast<int16_t>(read_u16(off)); }
    uint32_t read_u32(uint32_t off) const {
        if (off + 4 > data_.size()) throw ParseError(name_ + ": truncated font data");
        return (static_cast<uint32_t>(data_[off]) << 24) | (data_[off + 1] << 16) |
               (data_[off + 2] << 8) | data_[off + 3];
    }

    void parse() {
        const uint32_t version = read_u32(0);
        if (version != 0x00010000 && version != 0x74727565)  // 1.0 or 'true'
            throw FontError(name_ + ": not a TrueType font (CFF and collections unsupported)");
        const uint16_t num_tables = read_u16(4);
        uint32_t head = 0, maxp = 0, hhea = 0, cmap = 0, os2 = 0;
        for (uint16_t i = 0; i < num_tables; ++i) {
            const uint32_t rec = 12 + 16 * static_cast<uint32_t>(i);
            const uint32_t tag = read_u32(rec);
            const uint32_t off = read_u32(rec + 8);
            const uint32_t len = read_u32(rec + 12);
            switch (tag) {
                case 0x68656164: head = off; break;                 // head
                case 0x6d617870: maxp = off; break;                 // maxp
                case 0x68686561: hhea = off; break;                 // hhea
                case 0x686d7478: hmtx_ = off; break;                // hmtx
                case 0x6c6f6361: loca_ = off; break;                // loca
                case 0x676c7966: glyf_ = off; glyf_len_ = len; break;  // glyf
                case 0x636d6170: cmap = off; break;                 // cmap
                case 0x4f532f32: os2 = off; break;                  // OS/2
                default: break;
            }
        }
        if (!head || !maxp || !hhea || !hmtx_ || !loca_ || !glyf_ || !cmap)
            throw FontError(name_ + ": required TrueType table missing");

        units_per_em_ = read_u16(head + 18);
        loca_long_ = read_i16(head + 50);
        num_glyphs_ = read_u16(maxp + 4);
        num_hmetrics_ = read_u16(hhea + 34);
        ascent_ = read_i16(hhea + 4);
        descent_ = read_i16(hhea + 6);
        if (num_hmetrics_ == 0) throw FontError(name_ + ": zero hmetrics");

        select_cmap(cmap);

        cap_height_ = 0;
        if (os2) {
            const uint16_t os2_version = read_u16(os2);
            if (os2_version >= 2) cap_height_ = read_i16(os2 + 88);
        }
        if (cap_height_ <= 0) {
            double x0, y0, x1, y1;
            const uint16_t h_gid = glyph_index(U'H');
            if (h_gid != 0 && glyph_bbox(h_gid, x0, y0, x1, y1))
                cap_height_ = y1;
            else
                cap_height_ = 0.7 * units_per_em_;
        }
    }

    void select_cmap(uint32_t cmap) {
        const uint16_t n = read_u16(cmap + 2);
        uint32_t best = 0;
        int best_score = -1;
        for (uint16_t i = 0; i < n; ++i) {
            const uint32_t rec = cmap + 4 + 8 * static_cast<uint32_t>(i);
            const uint16_t platform = read_u16(rec);
            const uint16_t encoding = read_u16(rec + 2);
            const uint32_t sub = cmap + read_u32(rec + 4);
            const uint16_t format = read_u16(sub);
            int score = -1;
            if (format == 12 && ((platform == 3 && encoding == 10) || platform == 0))
                score = 2;
            else if (format == 4 && ((platform == 3 && encoding == 1) || platform == 0))
                score = 1;
            if (score > best_score) {
                best_score = score;
                best = sub;
            }
        }
        if (best_score < 0) throw FontError(name_ + ": no usable cmap subtable (need format 4 or 12)");
        cmap_sub_ = best;
        cmap_format_ = read_u16(best);
    }

    uint16_t lookup_cmap4(char32_t cp) const {
        if (cp > 0xFFFF) return 0;
        const uint32_t t = cmap_sub_;
        const uint16_t seg_x2 = read_u16(t + 6);
        const uint32_t end_codes = t + 14;
        const uint32_t start_codes = end_codes + seg_x2 + 2;
        const uint32_t id_deltas = start_codes + seg_x2;
        const uint32_t id_ranges = id_deltas + seg_x2;
        // binary search for the first segment with endCode >= cp
        uint32_t lo = 0, hi = seg_x2 / 2;
        while (lo < hi) {
            uint32_t mid = (lo + hi) / 2;
            if (read_u16(end_codes + 2 * mid) < cp)
                lo = mid + 1;
            else
                hi = mid;
        }
        if (lo >= seg_x2 / 2u) return 0;
        const uint16_t start = read_u16(start_codes + 2 * lo);
        if (cp < start) return 0;
        const uint16_t delta = read_u16(id_deltas + 2 * lo);
        const uint16_t range_off = read_u16(id_ranges + 2 * lo);
        if (range_off == 0) return static_cast<uint16_t>((cp + delta) & 0xFFFF);
        const uint32_t addr = id_ranges + 2 * lo + range_off + 2 * (cp - start);
        const uint16_t gid = read_u16(addr);
        return gid == 0 ? 0 : static_cast<uint16_t>((gid + delta) & 0xFFFF);
    }

    uint16_t lookup_cmap12(char32_t cp) const {
        const uint32_t t = cmap_sub_;
        const uint32_t n = read_u32(t + 12);
        uint32_t lo = 0, hi = n;
        while (lo < hi) {
            uint32_t mid = (lo + hi) / 2;
            const uint32_t g = t + 16 + 12 * mid;
            if (read_u32(g + 4) < cp)
                lo = mid + 1;
            else
                hi = mid;
        }
        if (lo >= n) return 0;
        const uint32_t g = t + 16 + 12 * lo;
        const uint32_t start = read_u32(g);
        if (cp < start) return 0;
        return static_cast<uint16_t>(read_u32(g + 8) + (cp - start));
    }

    bool glyph_range(uint16_t gid, uint32_t& off, uint32_t& len) const {
        if (gid >= num_glyphs_) return false;
        uint32_t o0, o1;
        if (loca_long_) {
            o0 = read_u32(loca_ + 4 * static_cast<uint32_t>(gid));
            o1 = read_u32(loca_ + 4 * static_cast<uint32_t>(gid) + 4);
        } else {
            o0 = 2u * read_u16(loca_ + 2 * static_cast<uint32_t>(gid));
            o1 = 2u * read_u16(loca_ + 2 * static_cast<uint32_t>(gid) + 2);
        }
        if (o1 < o0 || o1 > glyf_len_) return false;
        off = glyf_ + o0;
        len = o1 - o0;
        return true;
    }

    // Quadratic flattening: subdivision count grows with the control
    // point's deviation from the chord midpoint, measured in pixels.
    static void flatten_quad(double x0, double y0, double cx, double cy, double x1, double y1,
                             std::vector<LineEdge>& edges) {
        const double devx = x0 - 2 * cx + x1, devy = y0 - 2 * cy + y1;
        const double dev = std::sqrt(devx * devx + devy * devy) * 0.25;
        const int n = std::clamp(static_cast<int>(std::ceil(std::sqrt(dev / 0.1))), 1, 32);
        double px = x0, py = y0;
        for (int i = 1; i <= n; ++i) {
            const double t = static_cast<double>(i) / n;
            const double u = 1 - t;
            const double qx = u * u * x0 + 2 * u * t * cx + t * t * x1;
            const double qy = u * u * y0 + 2 * u * t * cy + t * t * y1;
            edges.push_back({static_cast<float>(px), static_cast<float>(py),
                             static_cast<float>(qx), static_cast<float>(qy)});
            px = qx;
            py = qy;
        }
    }

    struct GlyphPoint {
        double x, y;
        bool on_curve;
    };

    void append_outline(uint16_t gid, const Xform& xf, int depth, double scale,
                        double origin_x, double baseline_y, std::vector<LineEdge>& edges) const {
        if (depth > 8) return;  // malformed recursion guard
        uint32_t off, len;
        if (!glyph_range(gid, off, len) || len == 0) return;
        const int16_t n_contours = read_i16(off);
        if (n_contours >= 0)
            append_simple(off, n_contours, xf, scale, origin_x, baseline_y, edges);
        else
            append_composite(off, xf, depth, scale, origin_x, baseline_y, edges);
    }

    void append_simple(uint32_t off, int n_contours, const Xform& xf, double scale,
                       double origin_x, double baseline_y, std::vector<LineEdge>& edges) const {
        std::vector<uint16_t> ends(n_contours);
        uint32_t p = off + 10;
        for (int i = 0; i < n_contours; ++i) {
            ends[i] = read_u16(p);
            p += 2;
        }
        const uint16_t n_points = n_contours ? ends.back() + 1 : 0;
        const uint16_t instr_len = read_u16(p);
        p += 2 + instr_len;

        std::vector<uint8_t> flags(n_points);
        for (uint16_t i = 0; i < n_points;) {
            const uint8_t f = read_u8(p++);
            flags[i++] = f;
            if (f & 0x08) {  // repeat
                uint8_t rep = read_u8(p++);
                while (rep-- && i < n_points) flags[i++] = f;
            }
        }
        std::vector<GlyphPoint> pts(n_points);
        int32_t v = 0;
        for (uint16_t i = 0; i < n_points; ++i) {  // x deltas
            const uint8_t f = flags[i];
            if (f & 0x02) {
                const uint8_t d = read_u8(p++);
                v += (f & 0x10) ? d : -d;
            } else if (!(f & 0x10)) {
                v += read_i16(p);
                p += 2;
            }
            pts[i].x = v;
        }
        v = 0;
        for (uint16_t i = 0; i < n_points; ++i) {  // y deltas
            const uint8_t f = flags[i];
            if (f & 0x04) {
                const uint8_t d = read_u8(p++);
                v += (f & 0x20) ? d : -d;
            } else if (!(f & 0x20)) {
                v += read_i16(p);
                p += 2;
            }
            pts[i].y = v;
            pts[i].on_curve = (flags[i] & 0x01) != 0;
        }

        // map a font-unit point through the composite transform, then into
        // pixel space (y flipped)
        auto map = [&](const GlyphPoint& gp) {
            const double fx = xf.a * gp.x + xf.b * gp.y + xf.dx;
            const double fy = xf.c * gp.x + xf.d * gp.y + xf.dy;
            return GlyphPoint{origin_x + fx * scale, baseline_y - fy * scale, gp.on_curve};
        };

        uint16_t start = 0;
        for (int c = 0; c < n_contours; ++c) {
            const uint16_t end = ends[c];
            const uint16_t count = end - start + 1;
            if (count < 2) {
                start = end + 1;
                continue;
            }
            // establish an on-curve starting point (midpoint if none)
            std::vector<GlyphPoint> ring;
            ring.reserve(count);
            for (uint16_t i = 0; i < count; ++i) ring.push_back(map(pts[start + i]));
            size_t first_on = ring.size();
            for (size_t i = 0; i < ring.size(); ++i)
                if (ring[i].on_curve) { first_on = i; break; }
            GlyphPoint cur{};
            std::vector<GlyphPoint> seq;
            if (first_on == ring.size()) {
                cur = {(ring[0].x + ring.back().x) / 2, (ring[0].y + ring.back().y) / 2, true};
                seq.assign(ring.begin(), ring.end());
            } else {
                cur = ring[first_on];
                seq.insert(seq.end(), ring.begin() + first_on + 1, ring.end());
                seq.insert(seq.end(), ring.begin(), ring.begin() + first_on);
            }
            seq.push_back(cur);  // close the contour

            const GlyphPoint start_pt = cur;
            const GlyphPoint* pending_ctrl = nullptr;
            GlyphPoint ctrl_store{};
            for (const GlyphPoint& q : seq) {
                if (q.on_curve) {
                    if (pending_ctrl) {
                        flatten_quad(cur.x, cur.y, ctrl_store.x, ctrl_store.y, q.x, q.y, edges);
                        pending_ctrl = nullptr;
                    } else {
                        edges.push_back({static_cast<float>(cur.x), static_cast<float>(cur.y),
                                         static_cast<float>(q.x), static_cast<float>(q.y)});
                    }
                    cur = q;
                } else {
                    if (pending_ctrl) {
                        // two consecutive off-curve points imply an on-curve midpoint
                        GlyphPoint mid{(ctrl_store.x + q.x) / 2, (ctrl_store.y + q.y) / 2, true};
                        flatten_quad(cur.x, cur.y, ctrl_store.x, ctrl_store.y, mid.x, mid.y, edges);
                        cur = mid;
                    }
                    ctrl_store = q;
                    pending_ctrl = &ctrl_store;
                }
            }
            if (pending_ctrl)
                flatten_quad(cur.x, cur.y, ctrl_store.x, ctrl_store.y, start_pt.x, start_pt.y,
                             edges);
            start = end + 1;
        }
    }

    void append_composite(uint32_t off, const Xform& xf, int depth, double scale,
                          double origin_x, double baseline_y, std::vector<LineEdge>& edges) const {
        uint32_t p = off + 10;
        for (;;) {
            const uint16_t flags = read_u16(p);
            const uint16_t comp_gid = read_u16(p + 2);
            p += 4;
            double arg1, arg2;
            if (flags & 0x0001) {  // words
                arg1 = read_i16(p);
                arg2 = read_i16(p + 2);
                p += 4;
            } else {
                arg1 = static_cast<int8_t>(read_u8(p));
                arg2 = static_cast<int8_t>(read_u8(p + 1));
                p += 2;
            }
            double a = 1, b = 0, c = 0, d = 1;
            auto f2dot14 = [&](uint32_t q) { return read_i16(q) / 16384.0; };
            if (flags & 0x0008) {  // single scale
                a = d = f2dot14(p);
                p += 2;
            } else if (flags & 0x0040) {  // x and y scale
                a = f2dot14(p);
                d = f2dot14(p + 2);
                p += 4;
            } else if (flags & 0x0080) {  // 2x2
                a = f2dot14(p);
                b = f2dot14(p + 2);
                c = f2dot14(p + 4);
                d = f2dot14(p + 6);
                p += 8;
            }
            double dx = 0, dy = 0;
            if (flags & 0x0002) {  // args are xy offsets (point matching unsupported)
                dx = arg1;
                dy = arg2;
                if (flags & 0x0800) {  // scaled component offset
                    const double sdx = a * dx + b * dy;
                    const double sdy = c * dx + d * dy;
                    dx = sdx;
                    dy = sdy;
                }
            }
            // compose child transform with the parent's
            Xform child;
            child.a = xf.a * a + xf.b * c;
            child.b = xf.a * b + xf.b * d;
            child.c = xf.c * a + xf.d * c;
            child.d = xf.c * b + xf.d * d;
            child.dx = xf.a * dx + xf.b * dy + xf.dx;
            child.dy = xf.c * dx + xf.d * dy + xf.dy;
            append_outline(comp_gid, child, depth + 1, scale, origin_x, baseline_y, edges);
            if (!(flags & 0x0020)) break;  // no MORE_COMPONENTS
        }
    }
};

/// Rasterize edge coverage into a w x h alpha image, nonzero winding,
/// 4 sub-scanlines per row with exact horizontal span coverage.
inline ImageF32 rasterize_coverage(const std::vector<LineEdge>& edges, int w, int h) {
    ImageF32 out(w, h, 1, Colorspace::Gray, 0.f);
    if (edges.empty() || w <= 0 || h <= 0) return out;
    constexpr int kSub = 4;
    constexpr float kWeight = 1.f / kSub;

    struct Crossing {
        float x;
        int dir;
    };
    std::vector<Crossing> xs;
    std::vector<float> row(static_cast<size_t>(w));

    for (int y = 0; y < h; ++y) {
        std::fill(row.begin(), row.end(), 0.f);
        bool any = false;
        for (int s = 0; s < kSub; ++s) {
            const float sy = y + (s + 0.5f) / kSub;
            xs.clear();
            for (const LineEdge& e : edges) {
                const float ymin = std::min(e.y0, e.y1);
                const float ymax = std::max(e.y0, e.y1);
                if (sy < ymin || sy >= ymax || ymin == ymax) continue;
                const float t = (sy - e.y0) / (e.y1 - e.y0);
                xs.push_back({e.x0 + t * (e.x1 - e.x0), e.y1 > e.y0 ? 1 : -1});
            }
            if (xs.empty()) continue;
            std::sort(xs.begin(), xs.end(), [](const Crossing& a, const Crossing& b) {
                return a.x < b.x;
            });
            int winding = 0;
            float span_start = 0;
            for (const Crossing& c : xs) {
                if (winding == 0 && c.dir != 0) span_start = c.x;
                const int prev = winding;
                winding += c.dir;
                if (prev != 0 && winding == 0) {
                    // fill span [span_start, c.x) with fractional coverage
                    float xa = std::max(0.f, span_start);
                    float xb = std::min(static_cast<float>(w), c.x);
                    if (xb <= xa) continue;
                    any = true;
                    int ia = static_cast<int>(xa);
                    int ib = static_cast<int>(xb);
                    if (ia == ib) {
                        row[ia] += (xb - xa) * kWeight;
                    } else {
                        row[ia] += (ia + 1 - xa) * kWeight;
                        for (int i = ia + 1; i < ib; ++i) row[i] += kWeight;
                        if (ib < w) row[ib] += (xb - ib) * kWeight;
                    }
                }
            }
        }
        if (any) {
            float* dst = out.data.data() + static_cast<size_t>(y) * w;
            for (int x = 0; x < w; ++x) dst[x] = std::min(1.f, row[x]);
        }
    }
    return out;
}

} // namespace scenetext
