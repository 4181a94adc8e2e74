// unicode_fold.hpp - Compatibility folding for confusable codepoints.
//
// Maps fullwidth forms, mathematical alphanumerics, and small capitals back
// to plain ASCII before tokenizing, plus a few arithmetic lookalikes
// (U+2212 minus, U+00D7 times). Invalid UTF-8 bytes pass through unchanged.

#pragma once

#include <string>
#include <string_view>

namespace mathverify {

// Folds one codepoint; returns the replacement codepoint (may equal cp).
char32_t fold_codepoint(char32_t cp);

// Folds a UTF-8 string. Output is valid UTF-8 wherever the input was.
std::string fold_confusables(std::string_view input);

// Decodes one UTF-8 codepoint at `pos`; advances pos past it. Malformed
// bytes decode as themselves (one byte at a time), never throwing.
char32_t decode_utf8(std::string_view s, size_t& pos);

// Appends a codepoint as UTF-8.
void append_utf8(std::string& out, char32_t cp);

}  // namespace mathverify
