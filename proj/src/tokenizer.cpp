#include "nblens/tokenizer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

#include "nblens/errors.hpp"

namespace nblens {

namespace {

const std::unordered_set<std::string_view> kKeywordOperators = {
    "and", "or", "not", "in", "is"};

const std::unordered_set<std::string_view> kKeywords = {
    "False", "None",   "True",  "and",      "as",     "assert", "async",
    "await", "break",  "class", "continue", "def",    "del",    "elif",
    "else",  "except", "finally", "for",    "from",   "global", "if",
    "import", "in",    "is",    "lambda",   "nonlocal", "not",  "or",
    "pass",  "raise",  "return", "try",     "while",  "with",   "yield"};

// Longest-match symbolic tokens. "->" and bare "@" are structural, ":=" and
// "@=" are assignments; classification happens after the match.
const std::array<std::string_view, 44> kSymbols = {
    "**=", "//=", "<<=", ">>=",
    "==", "!=", "<=", ">=", "->", "+=", "-=", "*=", "/=", "%=",
    "&=", "|=", "^=", "@=", "**", "//", "<<", ">>", ":=",
    "+", "-", "*", "/", "%", "<", ">", "&", "|", "^", "~", "=",
    "(", ")", "[", "]", "{", "}", ",", ":", ";"};

bool is_operator_symbol(std::string_view s) {
    if (s == "->") return false;
    char c = s[0];
    if (s.size() == 1 &&
        (c == '(' || c == ')' || c == '[' || c == ']' || c == '{' ||
         c == '}' || c == ',' || c == ':' || c == ';'))
        return false;
    return true;
}

bool is_ident_start(unsigned char c) {
    return std::isalpha(c) || c == '_' || c >= 0x80;
}

bool is_ident_cont(unsigned char c) {
    return std::isalnum(c) || c == '_' || c >= 0x80;
}

bool is_string_prefix(std::string_view word) {
    if (word.empty() || word.size() > 2) return false;
    std::string low;
    for (char c : word) low.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return low == "r" || low == "b" || low == "u" || low == "f" ||
           low == "rb" || low == "br" || low == "fr" || low == "rf";
}

void validate_utf8(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        unsigned char c = s[i];
        std::size_t extra;
        if (c < 0x80)
            extra = 0;
        else if ((c & 0xE0) == 0xC0)
            extra = 1;
        else if ((c & 0xF0) == 0xE0)
            extra = 2;
        else if ((c & 0xF8) == 0xF0)
            extra = 3;
        else
            fail("InvalidEncoding", "invalid UTF-8 lead byte at offset " + std::to_string(i));
        if (i + extra >= s.size() && extra > 0)
            fail("InvalidEncoding", "truncated UTF-8 sequence at offset " + std::to_string(i));
        for (std::size_t k = 1; k <= extra; ++k)
            if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80)
                fail("InvalidEncoding", "invalid UTF-8 continuation at offset " + std::to_string(i + k));
        i += extra + 1;
    }
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        validate_utf8(src_);
        while (pos_ < src_.size()) {
            if (at_line_start_ && bracket_depth_ == 0) handle_indent();
            if (pos_ >= src_.size()) break;
            scan_one();
        }
        while (indents_.size() > 1) {
            indents_.pop_back();
            emit(TokenKind::Dedent, "", line_);
        }
        return std::move(out_);
    }

private:
    void emit(TokenKind kind, std::string text, int line) {
        out_.push_back(Token{kind, std::move(text), line});
    }

    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    // Measures leading whitespace of a logical-line start. Blank and
    // comment-only lines leave the indent stack alone.
    void handle_indent() {
        int col = 0;
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == ' ') {
                ++col;
                ++pos_;
            } else if (c == '\t') {
                col = (col / 8 + 1) * 8;
                ++pos_;
            } else if (c == '\f' || c == '\r') {
                ++pos_;
            } else {
                break;
            }
        }
        at_line_start_ = false;
        if (pos_ >= src_.size()) return;
        char c = src_[pos_];
        if (c == '\n' || c == '#') return;  // no indent change

        if (col > indents_.back()) {
            indents_.push_back(col);
            emit(TokenKind::Indent, "", line_);
        } else {
            while (indents_.back() > col) {
                indents_.pop_back();
                emit(TokenKind::Dedent, "", line_);
            }
        }
    }

    void scan_one() {
        char c = src_[pos_];
        if (c == ' ' || c == '\t' || c == '\f' || c == '\r') {
            ++pos_;
            return;
        }
        if (c == '\n') {
            ++pos_;
            if (bracket_depth_ == 0) {
                emit(TokenKind::Newline, "\n", line_);
                at_line_start_ = true;
            }
            ++line_;
            return;
        }
        if (c == '\\' && (peek(1) == '\n' || (peek(1) == '\r' && peek(2) == '\n'))) {
            pos_ += (peek(1) == '\r') ? 3 : 2;
            ++line_;
            return;  // explicit continuation: no Newline, no indent handling
        }
        if (c == '#') {
            scan_comment();
            return;
        }
        unsigned char uc = static_cast<unsigned char>(c);
        if (is_ident_start(uc)) {
            scan_word();
            return;
        }
        if (std::isdigit(uc) || (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
            scan_number();
            return;
        }
        if (c == '\'' || c == '"') {
            scan_string(pos_);
            return;
        }
        scan_symbol();
    }

    void scan_comment() {
        std::size_t start = pos_;
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
        emit(TokenKind::Comment, std::string(src_.substr(start, pos_ - start)), line_);
    }

    void scan_word() {
        std::size_t start = pos_;
        while (pos_ < src_.size() && is_ident_cont(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        std::string_view word = src_.substr(start, pos_ - start);
        char next = peek();
        if ((next == '\'' || next == '"') && is_string_prefix(word)) {
            scan_string(start);
            return;
        }
        if (kKeywordOperators.count(word)) {
            emit(TokenKind::KeywordOperator, std::string(word), line_);
        } else if (kKeywords.count(word)) {
            emit(TokenKind::KeywordOther, std::string(word), line_);
        } else {
            emit(TokenKind::Identifier, std::string(word), line_);
        }
    }

    void scan_number() {
        std::size_t start = pos_;
        if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X' || peek(1) == 'o' ||
                              peek(1) == 'O' || peek(1) == 'b' || peek(1) == 'B')) {
            pos_ += 2;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
        } else {
            auto digits = [&] {
                while (pos_ < src_.size() &&
                       (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                    ++pos_;
            };
            digits();
            if (peek() == '.') {
                ++pos_;
                digits();
            }
            if (peek() == 'e' || peek() == 'E') {
                std::size_t mark = pos_;
                ++pos_;
                if (peek() == '+' || peek() == '-') ++pos_;
                if (std::isdigit(static_cast<unsigned char>(peek()))) {
                    digits();
                } else {
                    pos_ = mark;  // not an exponent after all
                }
            }
            if (peek() == 'j' || peek() == 'J') ++pos_;
        }
        emit(TokenKind::NumberLiteral, std::string(src_.substr(start, pos_ - start)), line_);
    }

    // start points at the prefix (if any); pos_ is always at the opening
    // quote when this is called.
    void scan_string(std::size_t start) {
        char quote = src_[pos_];
        int start_line = line_;
        bool triple = peek(1) == quote && peek(2) == quote;
        pos_ += triple ? 3 : 1;
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '\\') {
                pos_ += 2;
                if (pos_ <= src_.size() && src_[pos_ - 1] == '\n') ++line_;
                continue;
            }
            if (c == '\n') {
                if (!triple) break;  // unterminated single-line string
                ++line_;
                ++pos_;
                continue;
            }
            if (c == quote) {
                if (!triple) {
                    ++pos_;
                    break;
                }
                if (peek(1) == quote && peek(2) == quote) {
                    pos_ += 3;
                    break;
                }
                ++pos_;
                continue;
            }
            ++pos_;
        }
        if (pos_ > src_.size()) pos_ = src_.size();
        emit(TokenKind::StringLiteral, std::string(src_.substr(start, pos_ - start)), start_line);
    }

    void scan_symbol() {
        for (std::string_view sym : kSymbols) {
            if (src_.substr(pos_).substr(0, sym.size()) == sym) {
                if (sym == "(" || sym == "[" || sym == "{") ++bracket_depth_;
                if (sym == ")" || sym == "]" || sym == "}")
                    bracket_depth_ = std::max(0, bracket_depth_ - 1);
                emit(is_operator_symbol(sym) ? TokenKind::Operator : TokenKind::Delimiter,
                     std::string(sym), line_);
                pos_ += sym.size();
                return;
            }
        }
        // '.', '@' and anything unrecognized
        emit(TokenKind::Delimiter, std::string(1, src_[pos_]), line_);
        ++pos_;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int bracket_depth_ = 0;
    bool at_line_start_ = true;
    std::vector<int> indents_{0};
    std::vector<Token> out_;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source) {
    return Lexer(source).run();
}

std::vector<LogicalLine> split_logical_lines(const std::vector<Token>& tokens) {
    std::vector<LogicalLine> lines;
    LogicalLine current;
    for (const Token& tok : tokens) {
        switch (tok.kind) {
            case TokenKind::Indent:
            case TokenKind::Dedent:
                break;
            case TokenKind::Newline:
                if (!current.tokens.empty()) lines.push_back(std::move(current));
                current = LogicalLine{};
                break;
            default:
                current.tokens.push_back(tok);
                break;
        }
    }
    if (!current.tokens.empty()) lines.push_back(std::move(current));
    return lines;
}

bool is_keyword(std::string_view word) { return kKeywords.count(word) > 0; }

}  // namespace nblens
