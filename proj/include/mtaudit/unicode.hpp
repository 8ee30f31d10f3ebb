#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace mtaudit::unicode {

// Strict decode: rejects overlongs, surrogates and truncated sequences.
std::optional<std::u32string> decode_utf8(std::string_view text);
bool is_valid_utf8(std::string_view text);
std::string encode_utf8(std::u32string_view text);

// Canonical composition. Input must be valid UTF-8.
std::string to_nfc(std::string_view text);
bool is_nfc(std::string_view text);

bool is_space(char32_t c);
bool is_upper(char32_t c);
bool is_alpha(char32_t c);
bool is_digit(char32_t c);
bool is_punct(char32_t c);
std::string to_lower(std::string_view text);

// Strips Unicode whitespace at both ends.
std::string trim(std::string_view text);
// Removes every Unicode whitespace scalar.
std::u32string strip_whitespace(std::u32string_view text);

}  // namespace mtaudit::unicode
