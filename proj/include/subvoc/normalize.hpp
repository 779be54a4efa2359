#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace subvoc {

// Text normalization applied before whitespace splitting.
//
// Normalization is a pure function of (input, config): the same line under
// the same config always yields the same token sequence.
//
// Coverage notes: lowercasing handles ASCII and the Latin-1 letter range;
// unicode_nfc applies canonical composition for the Latin-1 precomposed
// block (base letter + combining diacritic, e.g. "e" U+0301 -> U+00E9).
// Characters outside those ranges pass through unchanged.
struct NormalizationConfig {
    bool lowercase = true;
    bool split_punctuation = false;
    bool unicode_nfc = true;
};

// Decodes strict UTF-8. Throws DecodeError naming the byte offset of the
// first invalid byte. Offsets of each codepoint are returned so callers can
// slice the original bytes.
struct DecodedText {
    std::vector<char32_t> codepoints;
    std::vector<uint32_t> byte_offsets;  // offset of each codepoint; size()+1 entries, last = byte length
};
DecodedText decode_utf8(std::string_view text);

void append_utf8(std::string& out, char32_t cp);

bool is_whitespace(char32_t cp);
bool is_punctuation(char32_t cp);
char32_t to_lower(char32_t cp);

// Splits a line into maximal runs of non-whitespace characters after
// normalization. Empty lines yield an empty sequence. With
// split_punctuation set, each punctuation character becomes its own token.
std::vector<std::string> normalize_and_split(std::string_view line, const NormalizationConfig& config);

// normalize_and_split joined with single spaces; "" for token-free lines.
std::string normalize_join(std::string_view line, const NormalizationConfig& config);

// Number of codepoints in valid UTF-8 (no validation).
size_t utf8_length(std::string_view text);

}  // namespace subvoc
