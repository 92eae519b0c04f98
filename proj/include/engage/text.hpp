#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace engage::text {

// UTF-8 <-> codepoint helpers. Invalid byte sequences are passed through
// as U+FFFD so transcript ingestion never throws on mojibake.
std::vector<char32_t> decode_utf8(std::string_view s);
std::string encode_utf8(const std::vector<char32_t>& cps);

// Canonical composition for the combining sequences that occur in Spanish
// transcripts (acute, grave, diaeresis, tilde over ASCII bases). Text is
// normalized once at ingestion so downstream comparisons are consistent.
std::string normalize(std::string_view s);

// Case and diacritic folding: lowercases and strips accents/tilde so that
// "Está" and "esta" compare equal. Used by keyword matching and the
// baseline tokenizer.
std::string fold(std::string_view s);

// Splits folded text on non-alphanumeric runs.
std::vector<std::string> tokenize_folded(std::string_view folded);

std::string trim(std::string_view s);
bool is_blank(std::string_view s);

// Strips all ASCII whitespace; used by the segmentation lossless check.
std::string strip_whitespace(std::string_view s);

}  // namespace engage::text
