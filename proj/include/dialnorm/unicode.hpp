#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace dialnorm::unicode {

/// Throws DecodeError when `bytes` is not well-formed UTF-8.
void validate_utf8(std::string_view bytes);
bool is_valid_utf8(std::string_view bytes) noexcept;

std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view text);
std::string encode(char32_t cp);

std::string nfc(std::string_view utf8);
bool is_nfc(std::string_view utf8);

/// Strips leading and trailing Unicode whitespace.
std::string trim(std::string_view utf8);

/// NFC + trim, the canonical form for every text field read from disk.
inline std::string canonical(std::string_view utf8) { return trim(nfc(utf8)); }

std::string to_lower(std::string_view utf8);

char32_t to_upper(char32_t cp);
char32_t to_lower(char32_t cp);
bool is_upper(char32_t cp);
bool is_whitespace(char32_t cp);
bool is_letter_or_digit(char32_t cp);

/// Greek-script letters and combining marks.
bool is_greek_letter(char32_t cp);

/// ASCII apostrophe and its typographic stand-ins (’ ʼ ΄ ᾽).
bool is_apostrophe(char32_t cp);

/// Characters that belong to a word for rule matching: Greek letters and
/// apostrophes. Everything else is a boundary.
inline bool is_word_char(char32_t cp) { return is_greek_letter(cp) || is_apostrophe(cp); }

/// Vowels carrying a tonos (ά έ ή ί ό ύ ώ ΐ ΰ and the capitals).
bool is_stressed_vowel(char32_t cp);

/// A token with its byte span in the source string.
struct Token {
    std::string text;
    std::size_t begin = 0;
    std::size_t end = 0;
};

/// Splits on whitespace and punctuation. Apostrophes stay inside tokens.
std::vector<Token> tokenize(std::string_view utf8);

}  // namespace dialnorm::unicode
