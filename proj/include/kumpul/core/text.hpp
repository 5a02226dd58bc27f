#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace kumpul {

/// Canonical comparable form: NFC-composed, lowercased, whitespace runs
/// collapsed to one ASCII space, trimmed. Invalid UTF-8 sequences become
/// U+FFFD. Idempotent.
std::string normalize_text(std::string_view s);

/// Splits normalize_text(s) on non-alphanumeric boundaries. Underscore and
/// punctuation separate tokens; combining marks stay attached to the
/// preceding letter.
std::vector<std::string> tokenize(std::string_view s);

/// Decodes UTF-8 into code points (invalid bytes map to U+FFFD).
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);
void append_utf8(std::string& out, char32_t cp);

/// Number of code points in a UTF-8 string.
std::size_t utf8_length(std::string_view s);

} // namespace kumpul
