#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace genaug::uni {

// Minimal UTF-8 handling; bad bytes are kept as their Latin-1 codepoint so
// preprocessing is total over arbitrary input.
inline std::vector<char32_t> decode(std::string_view s) {
    std::vector<char32_t> out;
    out.reserve(s.size());
    std::size_t i = 0;
    const auto cont = [&](std::size_t k) {
        return i + k < s.size() && (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
    };
    while (i < s.size()) {
        const unsigned char b = static_cast<unsigned char>(s[i]);
        if (b < 0x80) {
            out.push_back(b);
            i += 1;
        } else if ((b & 0xE0) == 0xC0 && cont(1)) {
            out.push_back(((b & 0x1Fu) << 6) | (static_cast<unsigned char>(s[i + 1]) & 0x3Fu));
            i += 2;
        } else if ((b & 0xF0) == 0xE0 && cont(1) && cont(2)) {
            out.push_back(((b & 0x0Fu) << 12) | ((static_cast<unsigned char>(s[i + 1]) & 0x3Fu) << 6) |
                          (static_cast<unsigned char>(s[i + 2]) & 0x3Fu));
            i += 3;
        } else if ((b & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
            out.push_back(((b & 0x07u) << 18) | ((static_cast<unsigned char>(s[i + 1]) & 0x3Fu) << 12) |
                          ((static_cast<unsigned char>(s[i + 2]) & 0x3Fu) << 6) |
                          (static_cast<unsigned char>(s[i + 3]) & 0x3Fu));
            i += 4;
        } else {
            out.push_back(b);  // invalid byte, pass through
            i += 1;
        }
    }
    return out;
}

inline void append(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

inline std::string encode(const std::vector<char32_t>& cps) {
    std::string out;
    out.reserve(cps.size());
    for (char32_t cp : cps) append(out, cp);
    return out;
}

inline bool is_whitespace(char32_t cp) {
    switch (cp) {
        case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
        case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
        case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200B;
    }
}

// Emoji and symbol codepoints stripped during preprocessing: the common
// So/Sk blocks plus U+1F000-U+1FAFF and U+2600-U+27BF, approximated by
// block ranges rather than full Unicode category tables.
inline bool is_emoji(char32_t cp) {
    if (cp >= 0x1F000 && cp <= 0x1FAFF) return true;   // emoji, pictographs, symbols
    if (cp >= 0x2600 && cp <= 0x27BF) return true;     // misc symbols, dingbats
    if (cp >= 0x2B00 && cp <= 0x2BFF) return true;     // misc symbols and arrows
    if (cp >= 0x2300 && cp <= 0x23FF) return true;     // misc technical (watch, hourglass)
    if (cp >= 0x2460 && cp <= 0x24FF) return true;     // enclosed alphanumerics
    if (cp >= 0x2500 && cp <= 0x25FF) return true;     // box drawing, geometric shapes
    if (cp >= 0xFE00 && cp <= 0xFE0F) return true;     // variation selectors
    switch (cp) {
        case 0x00A9: case 0x00AE: case 0x2122:          // (c) (r) (tm)
        case 0x200D: case 0x20E3: case 0x3030:          // zwj, keycap, wavy dash
        case 0x303D: case 0x3297: case 0x3299:
            return true;
        default:
            return false;
    }
}

}  // namespace genaug::uni
