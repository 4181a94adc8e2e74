#include "mathverify/parse.hpp"

#include <cctype>
#include <cstdlib>
#include <optional>
#include <unordered_map>

#include "mathverify/eval.hpp"
#include "mathverify/unicode_fold.hpp"

namespace mathverify {

namespace {

constexpr int kMaxDepth = 200;
constexpr int kMaxExponentDigits = 4;  // caps 10^e blowup from literals
constexpr int kMaxPlusMinus = 4;

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

// ---------------------------------------------------------------------------
// Preprocessing: fold confusables, strip $ wrappers, \left/\right, spacing
// commands and \text{...} groups. Keeps a byte-offset map back to the
// original input so diagnostics point at real positions.
// ---------------------------------------------------------------------------

struct PreText {
    std::string buf;
    std::vector<size_t> src;  // src[i] = original offset of buf[i]
    // Inner span of the first removed \text group, used when stripping
    // leaves nothing to parse.
    std::string first_text_inner;
    bool had_text_group = false;

    void put(char c, size_t orig) {
        buf += c;
        src.push_back(orig);
    }
    void put_cp(char32_t cp, size_t orig) {
        size_t before = buf.size();
        append_utf8(buf, cp);
        for (size_t i = before; i < buf.size(); ++i) src.push_back(orig);
    }
};

bool match_word(std::string_view s, size_t pos, std::string_view word) {
    if (s.compare(pos, word.size(), word) != 0) return false;
    size_t end = pos + word.size();
    return end >= s.size() || !is_alpha(s[end]);
}

// Finds the matching close brace for the group opening at `open` (which must
// point at '{'). Escaped braces do not count. Returns npos if unbalanced.
size_t match_brace(std::string_view s, size_t open) {
    int depth = 0;
    for (size_t i = open; i < s.size(); ++i) {
        char c = s[i];
        if (c == '\\' && i + 1 < s.size()) {
            ++i;  // skip escaped char
            continue;
        }
        if (c == '{') ++depth;
        if (c == '}') {
            --depth;
            if (depth == 0) return i;
        }
    }
    return std::string_view::npos;
}

PreText preprocess(std::string_view in) {
    PreText out;
    out.buf.reserve(in.size());
    size_t i = 0;
    while (i < in.size()) {
        char c = in[i];
        if (c == '$') {
            ++i;
            continue;
        }
        if (c == '~') {
            out.put(' ', i);
            ++i;
            continue;
        }
        if (c == '\\' && i + 1 < in.size()) {
            char n = in[i + 1];
            if (n == '\\' || n == ',' || n == ';' || n == ':' || n == '!' || n == ' ') {
                out.put(' ', i);
                i += 2;
                continue;
            }
            if (n == '(' || n == ')' || n == '[' || n == ']') {
                // inline/display math delimiters
                i += 2;
                continue;
            }
            if (n == '$') {
                i += 2;
                continue;
            }
            if (n == '{' || n == '}') {
                out.put('\\', i);
                out.put(n, i + 1);
                i += 2;
                continue;
            }
            if (match_word(in, i + 1, "left") || match_word(in, i + 1, "right")) {
                i += 1 + (in[i + 1] == 'l' ? 4 : 5);
                if (i < in.size() && in[i] == '.') ++i;  // \left. / \right.
                continue;
            }
            if (match_word(in, i + 1, "quad") || match_word(in, i + 1, "qquad")) {
                out.put(' ', i);
                i += 1 + (in[i + 1] == 'q' && in[i + 2] == 'q' ? 5 : 4);
                continue;
            }
            if (match_word(in, i + 1, "text") || match_word(in, i + 1, "textrm") ||
                match_word(in, i + 1, "mbox")) {
                size_t cmd_end = i + 1;
                while (cmd_end < in.size() && is_alpha(in[cmd_end])) ++cmd_end;
                size_t brace = cmd_end;
                while (brace < in.size() && in[brace] == ' ') ++brace;
                if (brace < in.size() && in[brace] == '{') {
                    size_t close = match_brace(in, brace);
                    if (close != std::string_view::npos) {
                        if (!out.had_text_group) {
                            out.had_text_group = true;
                            out.first_text_inner =
                                std::string(in.substr(brace + 1, close - brace - 1));
                        }
                        out.put(' ', i);
                        i = close + 1;
                        continue;
                    }
                }
                // fall through: \text without a group, keep the command so the
                // tokenizer reports it
            }
        }
        size_t start = i;
        char32_t cp = decode_utf8(in, i);
        char32_t folded = fold_codepoint(cp);
        out.put_cp(folded, start);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Tokenizer
// ---------------------------------------------------------------------------

enum class Tok {
    Number,
    Symbol,   // single-letter or named symbol
    Command,  // \word
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,     // bare {
    RBrace,     // bare }
    SetLBrace,  // \{
    SetRBrace,  // \}
    Comma,
    Equals,
    Pipe,
    Percent,
    DegreeMark,  // U+00B0 or \degree
    End,
};

struct Token {
    Tok kind = Tok::End;
    size_t pos = 0;  // original-input byte offset
    std::string text;
    // Number payload: value = sig * 10^exp10
    mpz_class sig;
    int exp10 = 0;
    int dec_places = 0;
    bool is_decimal = false;
    bool is_plain_int = false;  // unsigned integer literal, no dot/exponent
};

const std::unordered_map<char32_t, const char*> kGreek = {
    {0x03B1, "alpha"}, {0x03B2, "beta"},  {0x03B3, "gamma"}, {0x03B4, "delta"},
    {0x03B5, "epsilon"}, {0x03B8, "theta"}, {0x03BB, "lambda"}, {0x03BC, "mu"},
    {0x03C1, "rho"},   {0x03C3, "sigma"}, {0x03C4, "tau"},   {0x03C6, "phi"},
    {0x03C9, "omega"},
};

struct Tokenizer {
    const PreText& pre;
    std::string_view s;
    size_t i = 0;
    std::vector<Token> tokens;
    std::optional<ParseIssue> issue;

    explicit Tokenizer(const PreText& p) : pre(p), s(p.buf) {}

    size_t orig(size_t buf_pos) const {
        if (pre.src.empty()) return 0;
        return buf_pos < pre.src.size() ? pre.src[buf_pos] : pre.src.back() + 1;
    }

    void fail(size_t at, std::string msg) {
        if (!issue) issue = ParseIssue{orig(at), std::move(msg)};
    }

    void push(Tok kind, size_t at, std::string text = {}) {
        Token t;
        t.kind = kind;
        t.pos = orig(at);
        t.text = std::move(text);
        tokens.push_back(std::move(t));
    }

    bool rest_is_blank(size_t from) const {
        for (size_t k = from; k < s.size(); ++k)
            if (!std::isspace(static_cast<unsigned char>(s[k]))) return false;
        return true;
    }

    // Reads digits, stripping thousands separators only when the whole
    // digits-and-commas run matches \d{1,3}(,\d{3})+ exactly and is not
    // followed by a decimal fraction. Otherwise commas stay list separators.
    std::string read_integer_digits() {
        std::string digits;
        while (i < s.size() && is_digit(s[i])) digits += s[i++];
        if (!digits.empty() && digits.size() <= 3 && i < s.size() && s[i] == ',') {
            size_t j = i;
            size_t groups = 0;
            bool well_formed = true;
            while (j < s.size() && s[j] == ',') {
                size_t k = j + 1, len = 0;
                while (k < s.size() && is_digit(s[k])) {
                    ++k;
                    ++len;
                }
                if (len == 0) break;  // trailing comma belongs to the list
                ++groups;
                if (len != 3) well_formed = false;
                j = k;
            }
            bool followed_by_decimal =
                j + 1 < s.size() && s[j] == '.' && is_digit(s[j + 1]);
            if (groups > 0 && well_formed && !followed_by_decimal) {
                while (i < j) {
                    if (s[i] != ',') digits += s[i];
                    ++i;
                }
            }
        }
        return digits;
    }

    void read_number() {
        size_t at = i;
        std::string int_part = read_integer_digits();
        std::string frac_part;
        bool is_dec = false;
        if (i + 1 < s.size() && s[i] == '.' && is_digit(s[i + 1])) {
            ++i;
            is_dec = true;
            while (i < s.size() && is_digit(s[i])) frac_part += s[i++];
        } else if (i < s.size() && s[i] == '.' && int_part.empty()) {
            fail(i, "unexpected '.'");
            return;
        }
        int sci_exp = 0;
        if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
            size_t save = i;
            size_t j = i + 1;
            bool neg = false;
            if (j < s.size() && (s[j] == '+' || s[j] == '-')) {
                neg = s[j] == '-';
                ++j;
            }
            if (j < s.size() && is_digit(s[j])) {
                std::string ed;
                while (j < s.size() && is_digit(s[j])) ed += s[j++];
                if (ed.size() > kMaxExponentDigits) {
                    fail(save, "exponent out of range");
                    return;
                }
                sci_exp = std::atoi(ed.c_str()) * (neg ? -1 : 1);
                is_dec = true;
                i = j;
            }
        }
        Token t;
        t.kind = Tok::Number;
        t.pos = orig(at);
        std::string digits = int_part.empty() ? "0" : int_part;
        digits += frac_part;
        t.sig = mpz_class(digits);
        t.exp10 = sci_exp - static_cast<int>(frac_part.size());
        t.dec_places = static_cast<int>(frac_part.size());
        t.is_decimal = is_dec;
        t.is_plain_int = !is_dec;
        tokens.push_back(std::move(t));
    }

    void read_command() {
        size_t at = i;
        ++i;  // backslash
        if (i < s.size() && (s[i] == '{' || s[i] == '}')) {
            push(s[i] == '{' ? Tok::SetLBrace : Tok::SetRBrace, at);
            ++i;
            return;
        }
        if (i < s.size() && s[i] == '%') {
            push(Tok::Percent, at);
            ++i;
            return;
        }
        std::string word;
        while (i < s.size() && is_alpha(s[i])) word += s[i++];
        if (word.empty()) {
            fail(at, "stray backslash");
            return;
        }
        if (word == "degree") {
            push(Tok::DegreeMark, at);
            return;
        }
        if (word == "cdot" || word == "times") {
            push(Tok::Star, at);
            return;
        }
        if (word == "div") {
            push(Tok::Slash, at);
            return;
        }
        if (word == "lbrace") {
            push(Tok::SetLBrace, at);
            return;
        }
        if (word == "rbrace") {
            push(Tok::SetRBrace, at);
            return;
        }
        if (word == "lvert" || word == "rvert" || word == "vert") {
            push(Tok::Pipe, at);
            return;
        }
        push(Tok::Command, at, word);
    }

    void run() {
        while (i < s.size() && !issue) {
            char c = s[i];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++i;
                continue;
            }
            if (is_digit(c)) {
                read_number();
                continue;
            }
            if (c == '.') {
                if (i + 1 < s.size() && is_digit(s[i + 1])) {
                    read_number();
                    continue;
                }
                if (rest_is_blank(i + 1) && !tokens.empty()) {
                    ++i;  // trailing sentence period
                    continue;
                }
                fail(i, "unexpected '.'");
                break;
            }
            if (is_alpha(c)) {
                // "pi" as a word; otherwise letters are individual symbols
                if (c == 'p' && i + 1 < s.size() && s[i + 1] == 'i' &&
                    (i + 2 >= s.size() || !is_alpha(s[i + 2]))) {
                    push(Tok::Command, i, "pi");
                    i += 2;
                    continue;
                }
                push(Tok::Symbol, i, std::string(1, c));
                ++i;
                continue;
            }
            switch (c) {
                case '+': push(Tok::Plus, i); ++i; continue;
                case '-': push(Tok::Minus, i); ++i; continue;
                case '*': push(Tok::Star, i); ++i; continue;
                case '/': push(Tok::Slash, i); ++i; continue;
                case '^': push(Tok::Caret, i); ++i; continue;
                case '(': push(Tok::LParen, i); ++i; continue;
                case ')': push(Tok::RParen, i); ++i; continue;
                case '[': push(Tok::LBracket, i); ++i; continue;
                case ']': push(Tok::RBracket, i); ++i; continue;
                case '{': push(Tok::LBrace, i); ++i; continue;
                case '}': push(Tok::RBrace, i); ++i; continue;
                case ',': push(Tok::Comma, i); ++i; continue;
                case '=': push(Tok::Equals, i); ++i; continue;
                case '|': push(Tok::Pipe, i); ++i; continue;
                case '%': push(Tok::Percent, i); ++i; continue;
                case '\\': read_command(); continue;
                default: break;
            }
            size_t at = i;
            char32_t cp = decode_utf8(s, i);
            if (cp == 0x00B0) {  // degree sign
                push(Tok::DegreeMark, at);
                continue;
            }
            if (cp == 0x2218) {  // ring operator, seen as \circ lookalike
                push(Tok::Command, at, "circ");
                continue;
            }
            if (cp == 0x03C0) {
                push(Tok::Command, at, "pi");
                continue;
            }
            if (cp == 0x221A) {
                push(Tok::Command, at, "sqrt");
                continue;
            }
            if (cp == 0x221E) {
                push(Tok::Command, at, "infty");
                continue;
            }
            auto g = kGreek.find(cp);
            if (g != kGreek.end()) {
                push(Tok::Symbol, at, g->second);
                continue;
            }
            fail(at, "unexpected character");
            break;
        }
        push(Tok::End, s.size());
    }
};

// ---------------------------------------------------------------------------
// Recursive-descent parser
// ---------------------------------------------------------------------------

const std::unordered_map<std::string, int> kGreekNames = {
    {"alpha", 1},  {"beta", 1},  {"gamma", 1}, {"delta", 1}, {"epsilon", 1},
    {"zeta", 1},   {"eta", 1},   {"theta", 1}, {"iota", 1},  {"kappa", 1},
    {"lambda", 1}, {"mu", 1},    {"nu", 1},    {"xi", 1},    {"rho", 1},
    {"sigma", 1},  {"tau", 1},   {"upsilon", 1}, {"phi", 1}, {"chi", 1},
    {"psi", 1},    {"omega", 1}, {"Gamma", 1}, {"Delta", 1}, {"Theta", 1},
    {"Lambda", 1}, {"Sigma", 1}, {"Phi", 1},   {"Psi", 1},   {"Omega", 1},
};

struct Parser {
    const std::vector<Token>& toks;
    size_t i = 0;
    int depth = 0;
    std::optional<ParseIssue> issue;

    explicit Parser(const std::vector<Token>& t) : toks(t) {}

    const Token& peek(size_t ahead = 0) const {
        size_t j = i + ahead;
        return j < toks.size() ? toks[j] : toks.back();
    }
    const Token& take() {
        const Token& t = peek();
        if (i < toks.size() - 1) ++i;
        return t;
    }
    bool at(Tok k, size_t ahead = 0) const { return peek(ahead).kind == k; }

    [[nodiscard]] ExprPtr fail(std::string msg) {
        if (!issue) issue = ParseIssue{peek().pos, std::move(msg)};
        return nullptr;
    }

    struct DepthGuard {
        Parser& p;
        bool ok;
        explicit DepthGuard(Parser& pp) : p(pp), ok(++p.depth <= kMaxDepth) {}
        ~DepthGuard() { --p.depth; }
    };

    bool is_circ_ahead() const {
        // ^\circ, ^{\circ}, ^o, ^{o}
        if (at(Tok::Command, 1) && peek(1).text == "circ") return true;
        if (at(Tok::Symbol, 1) && (peek(1).text == "o" || peek(1).text == "O"))
            return true;
        if (at(Tok::LBrace, 1)) {
            if (at(Tok::Command, 2) && peek(2).text == "circ" && at(Tok::RBrace, 3))
                return true;
            if (at(Tok::Symbol, 2) && peek(2).text == "o" && at(Tok::RBrace, 3))
                return true;
        }
        return false;
    }

    void skip_circ() {
        take();  // caret
        if (at(Tok::LBrace)) {
            take();
            take();
            take();
        } else {
            take();
        }
    }

    static ExprPtr number_node(const Token& t) {
        if (t.is_decimal) return make_decimal(t.sig, t.exp10, t.dec_places);
        return make_number(Rational(t.sig));
    }

    bool starts_atom(const Token& t) const {
        switch (t.kind) {
            case Tok::Symbol:
            case Tok::LParen:
            case Tok::SetLBrace:
            case Tok::LBrace:
                return true;
            case Tok::Command:
                return t.text == "frac" || t.text == "dfrac" || t.text == "tfrac" ||
                       t.text == "cfrac" || t.text == "sqrt" || t.text == "pi" ||
                       t.text == "boxed" || t.text == "mathrm" || t.text == "mathbf" ||
                       t.text == "mathit" || t.text == "mathsf" || t.text == "mathcal" ||
                       t.text == "textbf" || t.text == "operatorname" ||
                       t.text == "infty" || t.text == "emptyset";
            default:
                return false;
        }
    }

    // Literal unsigned integer/integer fraction used for mixed numbers.
    bool is_int_fraction_ahead() const {
        return at(Tok::Number) && peek().is_plain_int && at(Tok::Slash, 1) &&
               at(Tok::Number, 2) && peek(2).is_plain_int;
    }

    ExprPtr parse_braced_expr() {
        if (!at(Tok::LBrace)) return fail("expected '{'");
        take();
        ExprPtr e = parse_element();
        if (!e) return nullptr;
        if (!at(Tok::RBrace)) return fail("expected '}'");
        take();
        return e;
    }

    ExprPtr parse_braced_or_atom() {
        if (at(Tok::LBrace)) return parse_braced_expr();
        return parse_atom_postfix();
    }

    ExprPtr parse_group_transparent() {
        if (!at(Tok::LBrace)) return fail("expected '{'");
        take();
        ExprPtr e = parse_list_until(Tok::RBrace);
        if (!e) return nullptr;
        take();  // closer verified by parse_list_until
        return e;
    }

    // Parses a comma-separated element list up to (not consuming) `closer`.
    // Returns single element, or Tuple/Set by caller convention; here a
    // bare list becomes Tuple when >1.
    ExprPtr parse_list_until(Tok closer) {
        std::vector<ExprPtr> elems;
        if (!parse_elements(elems, closer)) return nullptr;
        if (!at(closer)) return fail("mismatched delimiter");
        if (elems.empty()) return fail("empty group");
        if (elems.size() == 1) return elems[0];
        if (closer == Tok::RBrace) return make_nary(ExprKind::Set, std::move(elems));
        return make_nary(ExprKind::Tuple, std::move(elems));
    }

    bool parse_elements(std::vector<ExprPtr>& out, Tok closer) {
        if (at(closer)) return true;
        while (true) {
            ExprPtr e = parse_element();
            if (!e) return false;
            out.push_back(std::move(e));
            if (at(Tok::Comma)) {
                take();
                continue;
            }
            return true;
        }
    }

    ExprPtr parse_atom() {
        DepthGuard g(*this);
        if (!g.ok) return fail("expression too deeply nested");
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Number:
                take();
                return number_node(t);
            case Tok::Symbol: {
                take();
                if (t.text == "e") return make_constant(ConstantKind::E);
                return make_symbol(t.text);
            }
            case Tok::Command:
                return parse_command_atom();
            case Tok::LParen: {
                take();
                return parse_paren_body(/*lo_open=*/true);
            }
            case Tok::LBracket: {
                take();
                return parse_bracket_body();
            }
            case Tok::SetLBrace: {
                take();
                std::vector<ExprPtr> elems;
                if (!parse_elements(elems, Tok::SetRBrace)) return nullptr;
                if (!at(Tok::SetRBrace)) return fail("expected '\\}'");
                take();
                return make_nary(ExprKind::Set, std::move(elems));
            }
            case Tok::LBrace: {
                take();
                std::vector<ExprPtr> elems;
                if (!parse_elements(elems, Tok::RBrace)) return nullptr;
                if (!at(Tok::RBrace)) return fail("expected '}'");
                take();
                if (elems.empty()) return fail("empty group");
                if (elems.size() == 1) return elems[0];
                return make_nary(ExprKind::Set, std::move(elems));
            }
            case Tok::Pipe: {
                take();
                ExprPtr inner = parse_expr();
                if (!inner) return nullptr;
                if (!at(Tok::Pipe)) return fail("expected closing '|'");
                take();
                return make_unary(ExprKind::Abs, std::move(inner));
            }
            case Tok::End:
                return fail("unexpected end of input");
            default:
                return fail("unexpected token");
        }
    }

    // Body after '(' was consumed. Closers: ')' -> group/Tuple,
    // ']' with two elements -> half-open interval.
    ExprPtr parse_paren_body(bool lo_open) {
        std::vector<ExprPtr> elems;
        if (!parse_elements(elems, Tok::RParen)) return nullptr;
        if (at(Tok::RParen)) {
            take();
            if (elems.empty()) return fail("empty parentheses");
            if (elems.size() == 1) return elems[0];
            return make_nary(ExprKind::Tuple, std::move(elems));
        }
        if (at(Tok::RBracket)) {
            take();
            if (elems.size() != 2) return fail("malformed interval");
            return finish_interval(std::move(elems[0]), std::move(elems[1]), lo_open,
                                   /*hi_open=*/false);
        }
        return fail("expected ')'");
    }

    ExprPtr parse_bracket_body() {
        std::vector<ExprPtr> elems;
        if (!parse_elements(elems, Tok::RBracket)) return nullptr;
        if (at(Tok::RBracket)) {
            take();
            if (elems.empty()) return fail("empty brackets");
            if (elems.size() == 1) return elems[0];
            if (elems.size() == 2)
                return finish_interval(std::move(elems[0]), std::move(elems[1]),
                                       /*lo_open=*/false, /*hi_open=*/false);
            return make_nary(ExprKind::Tuple, std::move(elems));
        }
        if (at(Tok::RParen)) {
            take();
            if (elems.size() != 2) return fail("malformed interval");
            return finish_interval(std::move(elems[0]), std::move(elems[1]),
                                   /*lo_open=*/false, /*hi_open=*/true);
        }
        return fail("expected ']'");
    }

    // Intervals with numeric endpoints out of order demote to Tuple so the
    // lo <= hi invariant always holds.
    static ExprPtr finish_interval(ExprPtr lo, ExprPtr hi, bool lo_open, bool hi_open) {
        try {
            double a = eval_float(lo);
            double b = eval_float(hi);
            if (a > b)
                return make_nary(ExprKind::Tuple, {std::move(lo), std::move(hi)});
        } catch (const EvalError&) {
            // non-numeric endpoints are allowed
        }
        return make_interval(std::move(lo), std::move(hi), lo_open, hi_open);
    }

    ExprPtr parse_command_atom() {
        const Token& t = take();
        const std::string& w = t.text;
        if (w == "pi") return make_constant(ConstantKind::Pi);
        if (w == "infty") return make_symbol("infty");
        if (w == "emptyset") return make_nary(ExprKind::Set, {});
        if (w == "frac" || w == "dfrac" || w == "tfrac" || w == "cfrac") {
            ExprPtr a = parse_braced_expr();
            if (!a) return nullptr;
            ExprPtr b = parse_braced_expr();
            if (!b) return nullptr;
            return make_binary(ExprKind::Div, std::move(a), std::move(b));
        }
        if (w == "sqrt") {
            ExprPtr degree = make_integer(2);
            if (at(Tok::LBracket)) {
                take();
                degree = parse_element();
                if (!degree) return nullptr;
                if (!at(Tok::RBracket)) return fail("expected ']'");
                take();
            }
            ExprPtr radicand = parse_braced_or_atom();
            if (!radicand) return nullptr;
            return make_binary(ExprKind::Root, std::move(radicand), std::move(degree));
        }
        if (w == "boxed" || w == "mathrm" || w == "mathbf" || w == "mathit" ||
            w == "mathsf" || w == "mathcal" || w == "textbf" || w == "operatorname") {
            return parse_group_transparent();
        }
        return fail("unsupported command '\\" + w + "'");
    }

    ExprPtr parse_atom_postfix() {
        ExprPtr e = parse_atom();
        if (!e) return nullptr;
        while (true) {
            if (at(Tok::Percent)) {
                take();
                e = make_unary(ExprKind::Percent, std::move(e));
                continue;
            }
            if (at(Tok::DegreeMark)) {
                take();
                e = make_unary(ExprKind::Degree, std::move(e));
                continue;
            }
            break;
        }
        return e;
    }

    ExprPtr parse_power() {
        DepthGuard g(*this);
        if (!g.ok) return fail("expression too deeply nested");
        ExprPtr base = parse_atom_postfix();
        if (!base) return nullptr;
        while (at(Tok::Caret)) {
            if (is_circ_ahead()) {
                skip_circ();
                base = make_unary(ExprKind::Degree, std::move(base));
                continue;
            }
            take();
            ExprPtr exp = parse_factor();
            if (!exp) return nullptr;
            base = make_binary(ExprKind::Pow, std::move(base), std::move(exp));
        }
        // postfix wrappers may follow an exponent: "90^2%" etc.
        while (at(Tok::Percent) || at(Tok::DegreeMark)) {
            ExprKind k = at(Tok::Percent) ? ExprKind::Percent : ExprKind::Degree;
            take();
            base = make_unary(k, std::move(base));
        }
        return base;
    }

    ExprPtr parse_factor() {
        DepthGuard g(*this);
        if (!g.ok) return fail("expression too deeply nested");
        int minus = 0;
        while (at(Tok::Minus) || at(Tok::Plus)) {
            if (take().kind == Tok::Minus) ++minus;
        }
        ExprPtr e = parse_power();
        if (!e) return nullptr;
        if (minus % 2) e = make_unary(ExprKind::Negate, std::move(e));
        return e;
    }

    // Multiplicative chain with explicit and implicit multiplication plus
    // mixed-number recognition ("2 1/2", "2\frac{1}{2}").
    ExprPtr parse_term() {
        DepthGuard g(*this);
        if (!g.ok) return fail("expression too deeply nested");
        const Token& first = peek();
        ExprPtr cur = parse_factor();
        if (!cur) return nullptr;
        bool cur_is_plain_int = first.kind == Tok::Number && first.is_plain_int &&
                                cur->kind == ExprKind::Number;
        while (true) {
            if (at(Tok::Star)) {
                take();
                ExprPtr rhs = parse_factor();
                if (!rhs) return nullptr;
                cur = make_binary(ExprKind::Mul, std::move(cur), std::move(rhs));
                cur_is_plain_int = false;
                continue;
            }
            if (at(Tok::Slash)) {
                take();
                ExprPtr rhs = parse_factor();
                if (!rhs) return nullptr;
                cur = make_binary(ExprKind::Div, std::move(cur), std::move(rhs));
                cur_is_plain_int = false;
                continue;
            }
            // mixed number: integer then integer fraction
            if (cur_is_plain_int && is_int_fraction_ahead()) {
                ExprPtr num = number_node(take());
                take();  // slash
                ExprPtr den = number_node(take());
                cur = make_binary(ExprKind::Add, std::move(cur),
                                  make_binary(ExprKind::Div, std::move(num), std::move(den)));
                cur_is_plain_int = false;
                continue;
            }
            if (cur_is_plain_int && at(Tok::Command) &&
                (peek().text == "frac" || peek().text == "dfrac" || peek().text == "tfrac" ||
                 peek().text == "cfrac")) {
                size_t save = i;
                ExprPtr fr = parse_command_atom();
                if (!fr) return nullptr;
                bool int_frac = fr->kind == ExprKind::Div &&
                                fr->kids[0]->kind == ExprKind::Number &&
                                fr->kids[0]->number.is_integer() &&
                                !fr->kids[0]->number.is_negative() &&
                                fr->kids[1]->kind == ExprKind::Number &&
                                fr->kids[1]->number.is_integer() &&
                                !fr->kids[1]->number.is_negative();
                (void)save;
                if (int_frac) {
                    cur = make_binary(ExprKind::Add, std::move(cur), std::move(fr));
                } else {
                    cur = make_binary(ExprKind::Mul, std::move(cur), std::move(fr));
                }
                cur_is_plain_int = false;
                continue;
            }
            if (starts_atom(peek())) {
                ExprPtr rhs = parse_power();
                if (!rhs) return nullptr;
                cur = make_binary(ExprKind::Mul, std::move(cur), std::move(rhs));
                cur_is_plain_int = false;
                continue;
            }
            break;
        }
        return cur;
    }

    // Additive chain. \pm / \mp fork the expression into a two-element set.
    ExprPtr parse_expr() {
        DepthGuard g(*this);
        if (!g.ok) return fail("expression too deeply nested");
        enum class Sign { Plus, Minus, PlusMinus };
        std::vector<std::pair<Sign, ExprPtr>> parts;
        Sign lead = Sign::Plus;
        if (at(Tok::Command) && (peek().text == "pm" || peek().text == "mp")) {
            take();
            lead = Sign::PlusMinus;
        }
        ExprPtr first = parse_term();
        if (!first) return nullptr;
        parts.emplace_back(lead, std::move(first));
        while (true) {
            Sign sg;
            if (at(Tok::Plus)) {
                sg = Sign::Plus;
            } else if (at(Tok::Minus)) {
                sg = Sign::Minus;
            } else if (at(Tok::Command) && (peek().text == "pm" || peek().text == "mp")) {
                sg = Sign::PlusMinus;
            } else {
                break;
            }
            take();
            ExprPtr t = parse_term();
            if (!t) return nullptr;
            parts.emplace_back(sg, std::move(t));
        }
        int n_pm = 0;
        for (auto& p : parts)
            if (p.first == Sign::PlusMinus) ++n_pm;
        if (n_pm > kMaxPlusMinus) return fail("too many \\pm operators");
        auto assemble = [&](unsigned mask) {
            std::vector<ExprPtr> terms;
            int pm_seen = 0;
            for (auto& p : parts) {
                bool neg;
                if (p.first == Sign::Plus) {
                    neg = false;
                } else if (p.first == Sign::Minus) {
                    neg = true;
                } else {
                    neg = (mask >> pm_seen) & 1u;
                    ++pm_seen;
                }
                terms.push_back(neg ? make_unary(ExprKind::Negate, p.second) : p.second);
            }
            if (terms.size() == 1) return terms[0];
            return make_nary(ExprKind::Add, std::move(terms));
        };
        if (n_pm == 0) return assemble(0);
        std::vector<ExprPtr> branches;
        for (unsigned mask = 0; mask < (1u << n_pm); ++mask)
            branches.push_back(assemble(mask));
        return make_nary(ExprKind::Set, std::move(branches));
    }

    // expr ('=' expr)*, right-folded. A lone-symbol lhs unwraps to the rhs.
    ExprPtr parse_element() {
        DepthGuard g(*this);
        if (!g.ok) return fail("expression too deeply nested");
        ExprPtr lhs = parse_expr();
        if (!lhs) return nullptr;
        if (!at(Tok::Equals)) return lhs;
        take();
        ExprPtr rhs = parse_element();
        if (!rhs) return nullptr;
        if (lhs->kind == ExprKind::Symbol) return rhs;
        return make_binary(ExprKind::Equation, std::move(lhs), std::move(rhs));
    }

    ExprPtr parse_answer_toplevel() {
        std::vector<ExprPtr> elems;
        while (true) {
            ExprPtr e = parse_element();
            if (!e) return nullptr;
            elems.push_back(std::move(e));
            if (at(Tok::Comma)) {
                take();
                continue;
            }
            break;
        }
        if (!at(Tok::End)) return fail("unexpected trailing input");
        if (elems.size() == 1) return elems[0];
        return make_nary(ExprKind::Tuple, std::move(elems));
    }
};

ParseResult parse_with_text(std::string_view text, int rewrap_budget);

ParseResult do_parse(std::string_view text, int rewrap_budget) {
    ParseResult res;
    res.diagnostics.input = std::string(text);

    bool all_blank = true;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) {
            all_blank = false;
            break;
        }
    if (text.empty() || all_blank) {
        res.diagnostics.issues.push_back({0, "empty input"});
        return res;
    }

    PreText pre = preprocess(text);

    bool pre_blank = true;
    for (char c : pre.buf)
        if (!std::isspace(static_cast<unsigned char>(c))) {
            pre_blank = false;
            break;
        }
    if (pre_blank && pre.had_text_group && rewrap_budget > 0) {
        // The whole answer was a \text{...} wrapper; parse its contents.
        ParseResult inner = parse_with_text(pre.first_text_inner, rewrap_budget - 1);
        inner.diagnostics.input = std::string(text);
        if (!inner.ok()) {
            for (auto& iss : inner.diagnostics.issues) iss.position = 0;
            inner.diagnostics.consumed_prefix_len = 0;
        } else {
            inner.diagnostics.consumed_prefix_len = text.size();
        }
        return inner;
    }
    if (pre_blank) {
        res.diagnostics.issues.push_back({0, "no parseable content"});
        return res;
    }

    Tokenizer tz(pre);
    tz.run();
    if (tz.issue) {
        res.diagnostics.issues.push_back(*tz.issue);
        res.diagnostics.consumed_prefix_len =
            std::min(tz.issue->position, text.size());
        return res;
    }

    Parser p(tz.tokens);
    ExprPtr e = p.parse_answer_toplevel();
    if (!e) {
        ParseIssue iss = p.issue ? *p.issue : ParseIssue{0, "parse error"};
        iss.position = std::min(iss.position, text.size());
        res.diagnostics.consumed_prefix_len = iss.position;
        res.diagnostics.issues.push_back(std::move(iss));
        return res;
    }
    res.expr = std::move(e);
    res.diagnostics.consumed_prefix_len = text.size();
    return res;
}

ParseResult parse_with_text(std::string_view text, int rewrap_budget) {
    return do_parse(text, rewrap_budget);
}

}  // namespace

ParseResult parse_answer(std::string_view text) {
    try {
        return do_parse(text, 4);
    } catch (const std::exception& ex) {
        // Totality backstop: surface any internal failure as a diagnostic.
        ParseResult res;
        res.diagnostics.input = std::string(text);
        res.diagnostics.issues.push_back({0, std::string("internal error: ") + ex.what()});
        return res;
    }
}

}  // namespace mathverify
