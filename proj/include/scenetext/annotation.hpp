#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "scenetext/errors.hpp"
#include "scenetext/geometry.hpp"

namespace scenetext {

/// One ground-truth instance: quadrilateral corners clockwise from
/// top-left plus the transcript.
struct QuadAnnotation {
    Quad quad;
    std::string transcript;
};

enum class GtFormat { IcdarWord, QuadLine };

inline GtFormat gt_format_from_string(const std::string& s) {
    if (s == "icdar-word") return GtFormat::IcdarWord;
    if (s == "quad" || s == "quad-line") return GtFormat::QuadLine;
    throw ConfigError("unknown ground-truth format \"" + s + "\"");
}

namespace annotation_detail {

inline std::string_view strip_bom(std::string_view s) {
    if (s.size() >= 3 && static_cast<unsigned char>(s[0]) == 0xEF &&
        static_cast<unsigned char>(s[1]) == 0xBB && static_cast<unsigned char>(s[2]) == 0xBF)
        s.remove_prefix(3);
    return s;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

/// Parse exactly `n` comma-separated numbers from the front of `s`,
/// advancing past them (and the trailing comma of the last one).
inline bool take_numbers(std::string_view& s, int n, double* out) {
    for (int i = 0; i < n; ++i) {
        size_t comma = s.find(',');
        std::string_view field = comma == std::string_view::npos ? s : s.substr(0, comma);
        field = trim(field);
        if (field.empty()) return false;
        try {
            size_t used = 0;
            std::string tmp(field);
            out[i] = std::stod(tmp, &used);
            if (used != tmp.size()) return false;
        } catch (...) {
            return false;
        }
        if (comma == std::string_view::npos) {
            if (i + 1 < n) return false;
            s = {};
        } else {
            s.remove_prefix(comma + 1);
        }
    }
    return true;
}

} // namespace annotation_detail

/// ICDAR2013 word line: x1,y1,x2,y2,"transcript" (xmin,ymin,xmax,ymax).
/// 8-coordinate quad line: x1,y1,...,y4,transcript (transcript verbatim
/// after the 8th comma). Both UTF-8, optional BOM, CR/LF tolerant.
inline std::vector<QuadAnnotation> parse_ground_truth(std::string_view content, GtFormat format) {
    using namespace annotation_detail;
    content = strip_bom(content);
    std::vector<QuadAnnotation> out;
    size_t lineno = 0;
    while (!content.empty()) {
        size_t nl = content.find('\n');
        std::string_view line = nl == std::string_view::npos ? content : content.substr(0, nl);
        content = nl == std::string_view::npos ? std::string_view{} : content.substr(nl + 1);
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (trim(line).empty()) continue;

        QuadAnnotation ann;
        if (format == GtFormat::IcdarWord) {
            double v[4];
            std::string_view rest = line;
            if (!take_numbers(rest, 4, v))
                throw ParseError("ground truth line " + std::to_string(lineno) +
                                 ": expected x1,y1,x2,y2,\"transcript\"");
            rest = trim(rest);
            if (rest.size() >= 2 && rest.front() == '"' && rest.back() == '"')
                rest = rest.substr(1, rest.size() - 2);
            ann.transcript = std::string(rest);
            ann.quad.pts[0] = {v[0], v[1]};
            ann.quad.pts[1] = {v[2], v[1]};
            ann.quad.pts[2] = {v[2], v[3]};
            ann.quad.pts[3] = {v[0], v[3]};
        } else {
            double v[8];
            std::string_view rest = line;
            if (!take_numbers(rest, 8, v))
                throw ParseError("ground truth line " + std::to_string(lineno) +
                                 ": expected 8 coordinates then transcript");
            ann.transcript = std::string(rest);
            for (int i = 0; i < 4; ++i) ann.quad.pts[i] = {v[2 * i], v[2 * i + 1]};
        }
        out.push_back(std::move(ann));
    }
    return out;
}

/// One emitted line: integer corner coordinates clockwise from top-left,
/// then the transcript. No quoting; LF terminated by the caller.
inline std::string format_annotation_line(const Quad& quad, const std::string& transcript) {
    std::ostringstream os;
    for (const auto& p : quad.pts)
        os << static_cast<long>(std::llround(p.x)) << ','
           << static_cast<long>(std::llround(p.y)) << ',';
    os << transcript;
    return os.str();
}

} // namespace scenetext
