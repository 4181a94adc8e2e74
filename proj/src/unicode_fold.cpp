#include "mathverify/unicode_fold.hpp"

#include <array>
#include <cstdint>

namespace mathverify {

char32_t decode_utf8(std::string_view s, size_t& pos) {
    unsigned char b0 = static_cast<unsigned char>(s[pos]);
    if (b0 < 0x80) {
        ++pos;
        return b0;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++pos;  // stray continuation or invalid lead byte
        return b0;
    }
    if (pos + len > s.size()) {
        ++pos;
        return b0;
    }
    for (int i = 1; i < len; ++i) {
        unsigned char b = static_cast<unsigned char>(s[pos + i]);
        if ((b & 0xC0) != 0x80) {
            ++pos;
            return b0;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    pos += len;
    return cp;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

namespace {

// Small capital letters are scattered across Phonetic Extensions and
// Latin Extended-D; q and x have no small-capital form.
struct SmallCap {
    char32_t cp;
    char ascii;
};

constexpr std::array<SmallCap, 25> kSmallCaps{{
    {0x1D00, 'a'}, {0x0299, 'b'}, {0x1D04, 'c'}, {0x1D05, 'd'}, {0x1D07, 'e'},
    {0xA730, 'f'}, {0x0262, 'g'}, {0x029C, 'h'}, {0x026A, 'i'}, {0x1D0A, 'j'},
    {0x1D0B, 'k'}, {0x029F, 'l'}, {0x1D0D, 'm'}, {0x0274, 'n'}, {0x1D0F, 'o'},
    {0x1D18, 'p'}, {0xA7AF, 'q'}, {0x0280, 'r'}, {0xA731, 's'}, {0x1D1B, 't'},
    {0x1D1C, 'u'}, {0x1D20, 'v'}, {0x1D21, 'w'}, {0x028F, 'y'}, {0x1D22, 'z'},
}};

}  // namespace

char32_t fold_codepoint(char32_t cp) {
    // Fullwidth ASCII block.
    if (cp >= 0xFF01 && cp <= 0xFF5E) return cp - 0xFEE0;
    if (cp == 0x3000) return ' ';  // ideographic space
    if (cp == 0x00A0) return ' ';  // no-break space
    // Mathematical alphanumerics: the styled-letter region repeats the
    // 52-letter A..Z a..z cycle per style.
    if (cp >= 0x1D400 && cp <= 0x1D6A3) {
        char32_t idx = (cp - 0x1D400) % 52;
        return idx < 26 ? ('A' + idx) : ('a' + (idx - 26));
    }
    // Mathematical digits, five styles of 0..9.
    if (cp >= 0x1D7CE && cp <= 0x1D7FF) return '0' + (cp - 0x1D7CE) % 10;
    for (const auto& sc : kSmallCaps)
        if (sc.cp == cp) return static_cast<char32_t>(sc.ascii);
    switch (cp) {
        case 0x2212: return '-';  // minus sign
        case 0x00D7: return '*';  // multiplication sign
        case 0x2044: return '/';  // fraction slash
        case 0x00F7: return '/';  // division sign
        default: return cp;
    }
}

std::string fold_confusables(std::string_view input) {
    std::string out;
    out.reserve(input.size());
    size_t pos = 0;
    while (pos < input.size()) {
        size_t start = pos;
        char32_t cp = decode_utf8(input, pos);
        char32_t folded = fold_codepoint(cp);
        if (folded == cp && cp >= 0x80 && pos - start > 1) {
            out.append(input.substr(start, pos - start));
        } else if (folded == cp && pos - start == 1) {
            out += input[start];
        } else {
            append_utf8(out, folded);
        }
    }
    return out;
}

}  // namespace mathverify
