#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace nblens {

// Token classes for the notebook kernel language (an indentation-block,
// dynamically typed scripting grammar). The frozen keyword/operator tables
// live in docs/grammar.md next to the repo root.
enum class TokenKind {
    Identifier,
    KeywordOperator,  // and or not in is
    KeywordOther,     // remaining keywords, including True/False/None
    Operator,
    Delimiter,        // brackets, commas, colons, dots, unknown characters
    NumberLiteral,
    StringLiteral,
    Comment,
    Newline,  // end of a logical line
    Indent,
    Dedent,
};

struct Token {
    TokenKind kind;
    std::string text;
    int line = 1;  // 1-based start line
};

// Best-effort lexing: never fails on valid UTF-8, unknown characters become
// Delimiter tokens. Logical lines honor backslash continuation and open
// bracket nesting; Indent/Dedent pairs are balanced over the stream.
// Errors: InvalidEncoding.
std::vector<Token> tokenize(std::string_view source);

// Tokens of one logical line; Newline/Indent/Dedent are stripped, comments
// are kept. Lines with no tokens at all are dropped.
struct LogicalLine {
    std::vector<Token> tokens;
};

std::vector<LogicalLine> split_logical_lines(const std::vector<Token>& tokens);

bool is_keyword(std::string_view word);

}  // namespace nblens
