#include "subvoc/normalize.hpp"

#include <array>
#include <utility>

#include "subvoc/error.hpp"

namespace subvoc {

namespace {

[[noreturn]] void bad_byte(size_t offset) {
    throw DecodeError("invalid UTF-8 byte at offset " + std::to_string(offset));
}

// Canonical compositions for the Latin-1 precomposed block.
struct Composition {
    char32_t base;
    char32_t mark;
    char32_t composed;
};

constexpr Composition kCompositions[] = {
    {U'A', 0x0300, 0x00C0}, {U'A', 0x0301, 0x00C1}, {U'A', 0x0302, 0x00C2},
    {U'A', 0x0303, 0x00C3}, {U'A', 0x0308, 0x00C4}, {U'A', 0x030A, 0x00C5},
    {U'C', 0x0327, 0x00C7},
    {U'E', 0x0300, 0x00C8}, {U'E', 0x0301, 0x00C9}, {U'E', 0x0302, 0x00CA}, {U'E', 0x0308, 0x00CB},
    {U'I', 0x0300, 0x00CC}, {U'I', 0x0301, 0x00CD}, {U'I', 0x0302, 0x00CE}, {U'I', 0x0308, 0x00CF},
    {U'N', 0x0303, 0x00D1},
    {U'O', 0x0300, 0x00D2}, {U'O', 0x0301, 0x00D3}, {U'O', 0x0302, 0x00D4},
    {U'O', 0x0303, 0x00D5}, {U'O', 0x0308, 0x00D6},
    {U'U', 0x0300, 0x00D9}, {U'U', 0x0301, 0x00DA}, {U'U', 0x0302, 0x00DB}, {U'U', 0x0308, 0x00DC},
    {U'Y', 0x0301, 0x00DD},
    {U'a', 0x0300, 0x00E0}, {U'a', 0x0301, 0x00E1}, {U'a', 0x0302, 0x00E2},
    {U'a', 0x0303, 0x00E3}, {U'a', 0x0308, 0x00E4}, {U'a', 0x030A, 0x00E5},
    {U'c', 0x0327, 0x00E7},
    {U'e', 0x0300, 0x00E8}, {U'e', 0x0301, 0x00E9}, {U'e', 0x0302, 0x00EA}, {U'e', 0x0308, 0x00EB},
    {U'i', 0x0300, 0x00EC}, {U'i', 0x0301, 0x00ED}, {U'i', 0x0302, 0x00EE}, {U'i', 0x0308, 0x00EF},
    {U'n', 0x0303, 0x00F1},
    {U'o', 0x0300, 0x00F2}, {U'o', 0x0301, 0x00F3}, {U'o', 0x0302, 0x00F4},
    {U'o', 0x0303, 0x00F5}, {U'o', 0x0308, 0x00F6},
    {U'u', 0x0300, 0x00F9}, {U'u', 0x0301, 0x00FA}, {U'u', 0x0302, 0x00FB}, {U'u', 0x0308, 0x00FC},
    {U'y', 0x0301, 0x00FD}, {U'y', 0x0308, 0x00FF},
};

char32_t compose_pair(char32_t base, char32_t mark) {
    for (const auto& c : kCompositions) {
        if (c.base == base && c.mark == mark) return c.composed;
    }
    return 0;
}

void compose_nfc(std::vector<char32_t>& cps) {
    size_t out = 0;
    for (size_t i = 0; i < cps.size(); ++i) {
        if (out > 0 && cps[i] >= 0x0300 && cps[i] <= 0x036F) {
            if (char32_t composed = compose_pair(cps[out - 1], cps[i]); composed != 0) {
                cps[out - 1] = composed;
                continue;
            }
        }
        cps[out++] = cps[i];
    }
    cps.resize(out);
}

}  // namespace

DecodedText decode_utf8(std::string_view text) {
    DecodedText result;
    result.codepoints.reserve(text.size());
    result.byte_offsets.reserve(text.size() + 1);
    const auto* bytes = reinterpret_cast<const unsigned char*>(text.data());
    size_t i = 0;
    const size_t n = text.size();
    while (i < n) {
        const size_t start = i;
        const unsigned char b0 = bytes[i];
        char32_t cp = 0;
        size_t len = 0;
        if (b0 < 0x80) {
            cp = b0;
            len = 1;
        } else if ((b0 & 0xE0) == 0xC0) {
            cp = b0 & 0x1F;
            len = 2;
            if (b0 < 0xC2) bad_byte(start);  // overlong
        } else if ((b0 & 0xF0) == 0xE0) {
            cp = b0 & 0x0F;
            len = 3;
        } else if ((b0 & 0xF8) == 0xF0) {
            cp = b0 & 0x07;
            len = 4;
            if (b0 > 0xF4) bad_byte(start);
        } else {
            bad_byte(start);
        }
        if (i + len > n) bad_byte(n);  // truncated sequence
        for (size_t k = 1; k < len; ++k) {
            const unsigned char c = bytes[i + k];
            if ((c & 0xC0) != 0x80) bad_byte(i + k);
            cp = (cp << 6) | (c & 0x3F);
        }
        // Overlong / out-of-range rejections.
        if (len == 3 && cp < 0x800) bad_byte(start);
        if (len == 4 && (cp < 0x10000 || cp > 0x10FFFF)) bad_byte(start);
        if (cp >= 0xD800 && cp <= 0xDFFF) bad_byte(start);
        result.codepoints.push_back(cp);
        result.byte_offsets.push_back(static_cast<uint32_t>(start));
        i += len;
    }
    result.byte_offsets.push_back(static_cast<uint32_t>(n));
    return result;
}

void append_utf8(std::string& out, char32_t cp) {
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

bool is_whitespace(char32_t cp) {
    switch (cp) {
        case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D:
        case 0x20: case 0x85: case 0xA0: case 0x1680:
        case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

bool is_punctuation(char32_t cp) {
    if ((cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
        (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E)) {
        return true;
    }
    switch (cp) {
        case 0xA1: case 0xA7: case 0xAB: case 0xB6: case 0xB7: case 0xBB: case 0xBF:
        case 0x3001: case 0x3002: case 0x3008: case 0x3009:
        case 0x300A: case 0x300B: case 0x300C: case 0x300D:
            return true;
        default:
            // General Punctuation block, spaces excluded above.
            return cp >= 0x2010 && cp <= 0x2060 && !is_whitespace(cp);
    }
}

char32_t to_lower(char32_t cp) {
    if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
    return cp;
}

std::vector<std::string> normalize_and_split(std::string_view line, const NormalizationConfig& config) {
    DecodedText decoded = decode_utf8(line);
    if (config.unicode_nfc) compose_nfc(decoded.codepoints);

    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    };
    for (char32_t cp : decoded.codepoints) {
        if (is_whitespace(cp)) {
            flush();
            continue;
        }
        if (config.lowercase) cp = to_lower(cp);
        if (config.split_punctuation && is_punctuation(cp)) {
            flush();
            append_utf8(current, cp);
            flush();
            continue;
        }
        append_utf8(current, cp);
    }
    flush();
    return tokens;
}

std::string normalize_join(std::string_view line, const NormalizationConfig& config) {
    std::string out;
    for (const std::string& token : normalize_and_split(line, config)) {
        if (!out.empty()) out.push_back(' ');
        out += token;
    }
    return out;
}

size_t utf8_length(std::string_view text) {
    size_t count = 0;
    for (unsigned char c : text) {
        if ((c & 0xC0) != 0x80) ++count;
    }
    return count;
}

}  // namespace subvoc
