#include "dialnorm/unicode.hpp"

#include "dialnorm/error.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/uscript.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <algorithm>

namespace dialnorm::unicode {

namespace {

const icu::Normalizer2& nfc_instance() {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status) || n == nullptr) {
        throw Error(std::string("ICU NFC normalizer unavailable: ") + u_errorName(status));
    }
    return *n;
}

}  // namespace

bool is_valid_utf8(std::string_view bytes) noexcept {
    const auto* s = reinterpret_cast<const uint8_t*>(bytes.data());
    const auto length = static_cast<int32_t>(bytes.size());
    int32_t i = 0;
    while (i < length) {
        UChar32 c;
        U8_NEXT(s, i, length, c);
        if (c < 0) return false;
    }
    return true;
}

void validate_utf8(std::string_view bytes) {
    const auto* s = reinterpret_cast<const uint8_t*>(bytes.data());
    const auto length = static_cast<int32_t>(bytes.size());
    int32_t i = 0;
    while (i < length) {
        const int32_t start = i;
        UChar32 c;
        U8_NEXT(s, i, length, c);
        if (c < 0) {
            throw DecodeError("invalid UTF-8 at byte offset " + std::to_string(start));
        }
    }
}

std::u32string decode(std::string_view utf8) {
    std::u32string out;
    out.reserve(utf8.size());
    const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
    const auto length = static_cast<int32_t>(utf8.size());
    int32_t i = 0;
    while (i < length) {
        const int32_t start = i;
        UChar32 c;
        U8_NEXT(s, i, length, c);
        if (c < 0) {
            throw DecodeError("invalid UTF-8 at byte offset " + std::to_string(start));
        }
        out.push_back(static_cast<char32_t>(c));
    }
    return out;
}

std::string encode(char32_t cp) {
    uint8_t buf[U8_MAX_LENGTH];
    int32_t i = 0;
    UBool error = false;
    U8_APPEND(buf, i, U8_MAX_LENGTH, static_cast<UChar32>(cp), error);
    if (error) throw DecodeError("code point not encodable as UTF-8");
    return std::string(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(i));
}

std::string encode(std::u32string_view text) {
    std::string out;
    out.reserve(text.size() * 2);
    for (char32_t cp : text) out += encode(cp);
    return out;
}

std::string nfc(std::string_view utf8) {
    validate_utf8(utf8);
    const auto& normalizer = nfc_instance();
    const auto source = icu::UnicodeString::fromUTF8(
        icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
    UErrorCode status = U_ZERO_ERROR;
    if (normalizer.isNormalized(source, status) && U_SUCCESS(status)) {
        return std::string(utf8);
    }
    status = U_ZERO_ERROR;
    const icu::UnicodeString result = normalizer.normalize(source, status);
    if (U_FAILURE(status)) throw DecodeError(std::string("NFC failed: ") + u_errorName(status));
    std::string out;
    result.toUTF8String(out);
    return out;
}

bool is_nfc(std::string_view utf8) {
    if (!is_valid_utf8(utf8)) return false;
    const auto source = icu::UnicodeString::fromUTF8(
        icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
    UErrorCode status = U_ZERO_ERROR;
    const bool ok = nfc_instance().isNormalized(source, status);
    return U_SUCCESS(status) && ok;
}

std::string trim(std::string_view utf8) {
    const std::u32string cps = decode(utf8);
    std::size_t b = 0;
    std::size_t e = cps.size();
    while (b < e && is_whitespace(cps[b])) ++b;
    while (e > b && is_whitespace(cps[e - 1])) --e;
    return encode(std::u32string_view(cps).substr(b, e - b));
}

std::string to_lower(std::string_view utf8) {
    validate_utf8(utf8);
    auto s = icu::UnicodeString::fromUTF8(
        icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
    s.toLower(icu::Locale::getRoot());
    std::string out;
    s.toUTF8String(out);
    return out;
}

char32_t to_upper(char32_t cp) { return static_cast<char32_t>(u_toupper(static_cast<UChar32>(cp))); }
char32_t to_lower(char32_t cp) { return static_cast<char32_t>(u_tolower(static_cast<UChar32>(cp))); }
bool is_upper(char32_t cp) { return u_isUUppercase(static_cast<UChar32>(cp)); }
bool is_whitespace(char32_t cp) { return u_isUWhiteSpace(static_cast<UChar32>(cp)); }

bool is_letter_or_digit(char32_t cp) {
    const auto c = static_cast<UChar32>(cp);
    return u_isalnum(c) || u_getCombiningClass(c) > 0 || u_charType(c) == U_NON_SPACING_MARK;
}

bool is_greek_letter(char32_t cp) {
    const auto c = static_cast<UChar32>(cp);
    if (u_charType(c) == U_NON_SPACING_MARK) return true;
    UErrorCode status = U_ZERO_ERROR;
    const UScriptCode script = uscript_getScript(c, &status);
    return U_SUCCESS(status) && script == USCRIPT_GREEK && u_isalpha(c);
}

bool is_apostrophe(char32_t cp) {
    switch (cp) {
        case U'\'':
        case U'’':  // right single quotation mark
        case U'ʼ':  // modifier letter apostrophe
        case U'΄':  // greek tonos, used as an elision mark by some transcribers
        case U'᾽':  // greek koronis
            return true;
        default:
            return false;
    }
}

bool is_stressed_vowel(char32_t cp) {
    static constexpr char32_t kStressed[] = {
        U'ά', U'έ', U'ή', U'ί', U'ό', U'ύ', U'ώ', U'ΐ', U'ΰ',
        U'Ά', U'Έ', U'Ή', U'Ί', U'Ό', U'Ύ', U'Ώ',
    };
    return std::find(std::begin(kStressed), std::end(kStressed), cp) != std::end(kStressed);
}

std::vector<Token> tokenize(std::string_view utf8) {
    std::vector<Token> tokens;
    const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
    const auto length = static_cast<int32_t>(utf8.size());
    int32_t i = 0;
    int32_t token_start = -1;
    auto flush = [&](int32_t end) {
        if (token_start >= 0) {
            const auto b = static_cast<std::size_t>(token_start);
            const auto e = static_cast<std::size_t>(end);
            tokens.push_back(Token{std::string(utf8.substr(b, e - b)), b, e});
            token_start = -1;
        }
    };
    while (i < length) {
        const int32_t start = i;
        UChar32 c;
        U8_NEXT(s, i, length, c);
        if (c < 0) throw DecodeError("invalid UTF-8 at byte offset " + std::to_string(start));
        const auto cp = static_cast<char32_t>(c);
        if (is_letter_or_digit(cp) || is_apostrophe(cp)) {
            if (token_start < 0) token_start = start;
        } else {
            flush(start);
        }
    }
    flush(length);
    return tokens;
}

}  // namespace dialnorm::unicode
