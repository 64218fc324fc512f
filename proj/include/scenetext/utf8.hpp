#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace scenetext {

/// Strict UTF-8 decode. Returns false and sets `bad_offset` on the first
/// invalid byte (overlongs, surrogates and out-of-range values rejected).
inline bool decode_utf8(std::string_view s, std::vector<char32_t>& out, size_t* bad_offset) {
    out.clear();
    size_t i = 0;
    const size_t n = s.size();
    while (i < n) {
        const unsigned char b0 = static_cast<unsigned char>(s[i]);
        uint32_t cp = 0;
        size_t len = 0;
        if (b0 < 0x80) {
            cp = b0;
            len = 1;
        } else if ((b0 & 0xE0) == 0xC0) {
            cp = b0 & 0x1F;
            len = 2;
        } else if ((b0 & 0xF0) == 0xE0) {
            cp = b0 & 0x0F;
            len = 3;
        } else if ((b0 & 0xF8) == 0xF0) {
            cp = b0 & 0x07;
            len = 4;
        } else {
            if (bad_offset) *bad_offset = i;
            return false;
        }
        if (i + len > n) {
            if (bad_offset) *bad_offset = i;
            return false;
        }
        for (size_t k = 1; k < len; ++k) {
            const unsigned char bk = static_cast<unsigned char>(s[i + k]);
            if ((bk & 0xC0) != 0x80) {
                if (bad_offset) *bad_offset = i;  // report the sequence start
                return false;
            }
            cp = (cp << 6) | (bk & 0x3F);
        }
        const bool overlong = (len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
                              (len == 4 && cp < 0x10000);
        if (overlong || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            if (bad_offset) *bad_offset = i;
            return false;
        }
        out.push_back(static_cast<char32_t>(cp));
        i += len;
    }
    return true;
}

inline bool is_valid_utf8(std::string_view s, size_t* bad_offset = nullptr) {
    std::vector<char32_t> tmp;
    return decode_utf8(s, tmp, bad_offset);
}

} // namespace scenetext
