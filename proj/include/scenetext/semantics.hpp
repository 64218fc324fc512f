#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scenetext/errors.hpp"
#include "scenetext/geometry.hpp"
#include "scenetext/image_io.hpp"
#include "scenetext/mask.hpp"

namespace scenetext {

/// Per-pixel class-label grid aligned to a background image.
struct SemanticMap {
    int width = 0;
    int height = 0;
    std::vector<uint16_t> labels;
    std::map<uint16_t, std::string> palette;

    const std::string& class_name(uint16_t id) const {
        auto it = palette.find(id);
        if (it == palette.end()) throw UnknownClassId(id);
        return it->second;
    }
};

enum class PolicyDefault { Allow, Deny };

/// The two-list split of class names: allow-listed surfaces take text,
/// deny-listed ones never do; unlisted classes follow the default rule.
struct SemanticPolicy {
    std::set<std::string> allow;
    std::set<std::string> deny;
    PolicyDefault default_rule = PolicyDefault::Deny;

    bool allows(const std::string& name) const {
        if (allow.count(name)) return true;
        if (deny.count(name)) return false;
        return default_rule == PolicyDefault::Allow;
    }

    void validate() const {
        for (const auto& name : allow)
            if (deny.count(name))
                throw ConfigError("policy lists '" + name + "' as both allow and deny");
    }

    static SemanticPolicy from_json(const nlohmann::json& j) {
        SemanticPolicy p;
        if (j.contains("allow"))
            for (const auto& v : j.at("allow")) p.allow.insert(v.get<std::string>());
        if (j.contains("deny"))
            for (const auto& v : j.at("deny")) p.deny.insert(v.get<std::string>());
        if (j.contains("default")) {
            std::string d = j.at("default").get<std::string>();
            if (d == "allow") p.default_rule = PolicyDefault::Allow;
            else if (d == "deny") p.default_rule = PolicyDefault::Deny;
            else throw ConfigError("policy default must be \"allow\" or \"deny\", got \"" + d + "\"");
        }
        p.validate();
        return p;
    }

    static SemanticPolicy load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open policy file " + path.string());
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("invalid policy JSON in " + path.string() + ": " + e.what());
        }
        return from_json(j);
    }

    SemanticPolicy inverted() const {
        SemanticPolicy p;
        p.allow = deny;
        p.deny = allow;
        p.default_rule = default_rule == PolicyDefault::Allow ? PolicyDefault::Deny
                                                              : PolicyDefault::Allow;
        return p;
    }
};

/// Parse a palette file: UTF-8 lines "id<TAB>name", '#' comments.
inline std::map<uint16_t, std::string> load_palette(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open palette file " + path.string());
    std::map<uint16_t, std::string> palette;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (lineno == 1 && line.size() >= 3 &&
            static_cast<unsigned char>(line[0]) == 0xEF &&
            static_cast<unsigned char>(line[1]) == 0xBB &&
            static_cast<unsigned char>(line[2]) == 0xBF)
            line.erase(0, 3);
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw ParseError(path.string() + ":" + std::to_string(lineno) +
                             ": expected \"id<TAB>name\"");
        unsigned long id;
        try {
            id = std::stoul(line.substr(0, tab));
        } catch (...) {
            throw ParseError(path.string() + ":" + std::to_string(lineno) + ": bad class id");
        }
        if (id > 0xFFFF)
            throw ParseError(path.string() + ":" + std::to_string(lineno) + ": class id > 65535");
        std::string name = line.substr(tab + 1);
        while (!name.empty() && (name.back() == ' ' || name.back() == '\t')) name.pop_back();
        if (name.empty())
            throw ParseError(path.string() + ":" + std::to_string(lineno) + ": empty class name");
        palette[static_cast<uint16_t>(id)] = name;
    }
    return palette;
}

/// Load a label image plus palette and validate palette coverage.
inline SemanticMap load_semantic_map(const std::filesystem::path& label_path,
                                     const std::filesystem::path& palette_path) {
    SemanticMap map;
    map.labels = read_png_gray16(label_path, map.width, map.height);
    map.palette = load_palette(palette_path);
    for (uint16_t id : map.labels)
        if (!map.palette.count(id)) throw UnknownClassId(id);
    return map;
}

/// True exactly where the pixel's class name is allowed by the policy.
inline BinaryMask semantic_mask(const SemanticMap& map, const SemanticPolicy& policy) {
    BinaryMask mask(map.width, map.height);
    std::map<uint16_t, uint8_t> verdict;
    for (const auto& [id, name] : map.palette)
        verdict[id] = policy.allows(name) ? 1 : 0;
    for (size_t i = 0; i < map.labels.size(); ++i) {
        auto it = verdict.find(map.labels[i]);
        if (it == verdict.end()) throw UnknownClassId(map.labels[i]);
        mask.data[i] = it->second;
    }
    return mask;
}

struct RegionComponent {
    int id = 0;          // index into RegionLabeling::components
    int64_t area = 0;
    RectI bbox;          // tight bounds
};

/// Label grid for 4-connected components; -1 marks background pixels and
/// components dropped by the min_area filter.
struct RegionLabeling {
    int width = 0;
    int height = 0;
    std::vector<int32_t> labels;
    std::vector<RegionComponent> components;

    int32_t label_at(int x, int y) const { return labels[static_cast<size_t>(y) * width + x]; }
};

inline RegionLabeling connected_regions(const BinaryMask& mask, int64_t min_area) {
    RegionLabeling out;
    out.width = mask.width;
    out.height = mask.height;
    out.labels.assign(mask.size(), -1);

    const int w = mask.width, h = mask.height;
    std::vector<int32_t> stack, filled;
    for (int sy = 0; sy < h; ++sy) {
        for (int sx = 0; sx < w; ++sx) {
            size_t si = static_cast<size_t>(sy) * w + sx;
            if (!mask.data[si] || out.labels[si] != -1) continue;
            // flood fill one component
            const int32_t id = static_cast<int32_t>(out.components.size());
            RegionComponent comp;
            comp.id = id;
            int x0 = sx, y0 = sy, x1 = sx, y1 = sy;
            stack.clear();
            filled.clear();
            stack.push_back(static_cast<int32_t>(si));
            out.labels[si] = id;
            while (!stack.empty()) {
                int32_t idx = stack.back();
                stack.pop_back();
                filled.push_back(idx);
                int x = idx % w, y = idx / w;
                ++comp.area;
                x0 = std::min(x0, x); x1 = std::max(x1, x);
                y0 = std::min(y0, y); y1 = std::max(y1, y);
                const int nx[4] = {x - 1, x + 1, x, x};
                const int ny[4] = {y, y, y - 1, y + 1};
                for (int k = 0; k < 4; ++k) {
                    if (nx[k] < 0 || ny[k] < 0 || nx[k] >= w || ny[k] >= h) continue;
                    size_t ni = static_cast<size_t>(ny[k]) * w + nx[k];
                    if (mask.data[ni] && out.labels[ni] == -1) {
                        out.labels[ni] = id;
                        stack.push_back(static_cast<int32_t>(ni));
                    }
                }
            }
            comp.bbox = {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
            if (comp.area >= min_area) {
                out.components.push_back(comp);
            } else {
                for (int32_t idx : filled) out.labels[idx] = -1;
            }
        }
    }
    return out;
}

} // namespace scenetext
