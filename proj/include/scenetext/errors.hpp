#pragma once

#include <stdexcept>
#include <string>

namespace scenetext {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidChannelCount : public Error { public: using Error::Error; };
class ImageTooSmall       : public Error { public: using Error::Error; };
class DimensionMismatch   : public Error { public: using Error::Error; };
class IoError             : public Error { public: using Error::Error; };
class ParseError          : public Error { public: using Error::Error; };
class ConfigError         : public Error { public: using Error::Error; };

class UnknownClassId : public Error {
public:
    explicit UnknownClassId(uint16_t id)
        : Error("semantic label " + std::to_string(id) + " has no palette entry"), id_(id) {}
    uint16_t id() const { return id_; }
private:
    uint16_t id_;
};

class NoBackgroundRing  : public Error { public: using Error::Error; };
class SegmentationFailed : public Error { public: using Error::Error; };
class EmptyDatabase     : public Error { public: using Error::Error; };
class StaleDatabase     : public Error { public: using Error::Error; };
class EmptyFontList     : public Error { public: using Error::Error; };
class FontError         : public Error { public: using Error::Error; };
class EmptyText         : public Error { public: using Error::Error; };
class EmptyCorpus       : public Error { public: using Error::Error; };

class MissingGlyph : public Error {
public:
    explicit MissingGlyph(char32_t cp)
        : Error("font has no glyph for U+" + hex(cp)), codepoint_(cp) {}
    char32_t codepoint() const { return codepoint_; }
private:
    static std::string hex(char32_t cp) {
        static const char* digits = "0123456789ABCDEF";
        std::string s;
        for (int shift = 28; shift >= 0; shift -= 4) {
            unsigned nib = (static_cast<uint32_t>(cp) >> shift) & 0xF;
            if (!s.empty() || nib || shift < 16) s.push_back(digits[nib]);
        }
        return s;
    }
    char32_t codepoint_;
};

class EncodingError : public Error {
public:
    EncodingError(const std::string& path, size_t offset)
        : Error("invalid UTF-8 in " + path + " at byte " + std::to_string(offset)),
          path_(path), offset_(offset) {}
    const std::string& path() const { return path_; }
    size_t offset() const { return offset_; }
private:
    std::string path_;
    size_t offset_;
};

} // namespace scenetext
