#pragma once

#include <cctype>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "scenetext/errors.hpp"
#include "scenetext/rng.hpp"
#include "scenetext/utf8.hpp"

namespace scenetext {

enum class Granularity { Word, Line };

inline Granularity granularity_from_string(const std::string& s) {
    if (s == "word") return Granularity::Word;
    if (s == "line") return Granularity::Line;
    throw ConfigError("granularity must be \"word\" or \"line\", got \"" + s + "\"");
}

/// Source texts: words split on whitespace or verbatim non-blank lines.
struct TextCorpus {
    std::vector<std::string> units;
    std::vector<std::string> language;  // per-unit tag, "und" when unknown
    Granularity granularity = Granularity::Word;
};

namespace corpus_detail {

inline bool is_ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline bool punctuation_only(const std::string& token) {
    for (char c : token)
        if (!std::ispunct(static_cast<unsigned char>(c))) return false;
    return !token.empty();
}

inline bool blank(const std::string& s) {
    for (char c : s)
        if (!is_ascii_space(c)) return false;
    return true;
}

} // namespace corpus_detail

/// Load UTF-8 text files. Word mode splits on ASCII whitespace and drops
/// punctuation-only tokens; Line mode keeps non-blank lines verbatim.
/// Invalid UTF-8 raises EncodingError with the offending byte offset.
inline TextCorpus load_corpus(const std::vector<std::filesystem::path>& paths,
                              Granularity granularity,
                              const std::vector<std::string>& language_tags = {}) {
    using namespace corpus_detail;
    TextCorpus corpus;
    corpus.granularity = granularity;
    for (size_t pi = 0; pi < paths.size(); ++pi) {
        const auto& path = paths[pi];
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open corpus file " + path.string());
        std::string content((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
        if (content.size() >= 3 && static_cast<unsigned char>(content[0]) == 0xEF &&
            static_cast<unsigned char>(content[1]) == 0xBB &&
            static_cast<unsigned char>(content[2]) == 0xBF)
            content.erase(0, 3);
        size_t bad = 0;
        if (!is_valid_utf8(content, &bad)) throw EncodingError(path.string(), bad);
        const std::string lang = pi < language_tags.size() ? language_tags[pi] : "und";

        if (granularity == Granularity::Word) {
            std::string token;
            auto flush = [&] {
                if (!token.empty() && !punctuation_only(token)) {
                    corpus.units.push_back(token);
                    corpus.language.push_back(lang);
                }
                token.clear();
            };
            for (char c : content) {
                if (is_ascii_space(c))
                    flush();
                else
                    token.push_back(c);
            }
            flush();
        } else {
            size_t pos = 0;
            while (pos <= content.size()) {
                size_t nl = content.find('\n', pos);
                std::string line = content.substr(
                    pos, nl == std::string::npos ? std::string::npos : nl - pos);
                if (!line.empty() && line.back() == '\r') line.pop_back();
                if (!blank(line)) {
                    corpus.units.push_back(line);
                    corpus.language.push_back(lang);
                }
                if (nl == std::string::npos) break;
                pos = nl + 1;
            }
        }
    }
    return corpus;
}

/// Uniform draw; deterministic under the caller's seeded RNG.
inline const std::string& sample_text(const TextCorpus& corpus, Rng& rng) {
    if (corpus.units.empty()) throw EmptyCorpus("corpus has no units");
    return corpus.units[rng.bounded(corpus.units.size())];
}

} // namespace scenetext
