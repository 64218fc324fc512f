#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "scenetext/errors.hpp"
#include "scenetext/rng.hpp"
#include "scenetext/truetype.hpp"

namespace scenetext {

struct FontEntry {
    std::filesystem::path file;
    std::string style;  // stem of the file, e.g. "DejaVuSans-Bold"
};

/// The pre-defined font list text is drawn from. Every entry has been
/// loaded once at list-build time, so later loads can only fail on I/O.
struct FontList {
    std::vector<FontEntry> entries;
};

/// Scan a directory for loadable .ttf files (sorted by name). Files that
/// fail to parse are skipped.
inline FontList load_font_list(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw ConfigError("font dir does not exist: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (ext == ".ttf") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    FontList list;
    for (const auto& f : files) {
        try {
            (void)FontFace::load(f);  // validate: must parse as a scalable font
            list.entries.push_back({f, f.stem().string()});
        } catch (const Error&) {
            // unusable file; leave it out
        }
    }
    if (list.entries.empty())
        throw EmptyFontList("no loadable .ttf fonts in " + dir.string());
    return list;
}

/// Uniform pick; deterministic under the caller's seeded RNG.
inline const FontEntry& pick_font(const FontList& fonts, Rng& rng) {
    if (fonts.entries.empty()) throw EmptyFontList("font list is empty");
    return fonts.entries[rng.bounded(fonts.entries.size())];
}

/// Read-through cache of parsed faces; faces are immutable once loaded and
/// may be shared across worker threads.
class FontCache {
public:
    std::shared_ptr<const FontFace> get(const std::filesystem::path& path) {
        std::lock_guard lock(mu_);
        auto it = faces_.find(path.string());
        if (it != faces_.end()) return it->second;
        auto face = std::make_shared<const FontFace>(FontFace::load(path));
        faces_.emplace(path.string(), face);
        return face;
    }

private:
    std::mutex mu_;
    std::map<std::string, std::shared_ptr<const FontFace>> faces_;
};

} // namespace scenetext
