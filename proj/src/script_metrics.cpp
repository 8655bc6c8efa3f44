#include "nblens/script_metrics.hpp"

#include <map>
#include <set>
#include <string>
#include <unordered_set>

#include "nblens/notebook.hpp"
#include "nblens/tokenizer.hpp"

namespace nblens {

namespace {

bool is_blank(std::string_view line) {
    return line.find_first_not_of(" \t\r\f\v") == std::string_view::npos;
}

long codepoints(std::string_view text) {
    long n = 0;
    for (unsigned char c : text)
        if ((c & 0xC0) != 0x80) ++n;
    return n;
}

long word_count(std::string_view text) {
    long words = 0;
    bool in_word = false;
    for (unsigned char c : text) {
        bool ws = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
        if (!ws && !in_word) ++words;
        in_word = !ws;
    }
    return words;
}

bool is_kw(const Token& t, std::string_view word) {
    return t.kind == TokenKind::KeywordOther && t.text == word;
}

bool is_delim(const Token& t, std::string_view text) {
    return t.kind == TokenKind::Delimiter && t.text == text;
}

// The literal keywords count as operands and normalize like literals.
bool is_literal_keyword(const Token& t) {
    return t.kind == TokenKind::KeywordOther &&
           (t.text == "True" || t.text == "False" || t.text == "None");
}

// Flow keywords that take an operand; counted on the operator side.
const std::unordered_set<std::string_view> kFlowOperatorKeywords = {
    "return", "yield", "del", "raise", "assert", "await", "lambda"};

const std::unordered_set<std::string_view> kDecisionKeywords = {
    "if", "elif", "for", "while", "except", "assert"};

std::vector<Token> without_comments(const std::vector<Token>& tokens) {
    std::vector<Token> out;
    out.reserve(tokens.size());
    for (const Token& t : tokens)
        if (t.kind != TokenKind::Comment) out.push_back(t);
    return out;
}

// Parameter items between a matched bracket pair, split on top-level commas.
// A lambda inside skips ahead to its own colon so its parameters are not
// attributed to the enclosing header.
long count_param_items(const std::vector<Token>& toks, std::size_t open, std::size_t close) {
    long items = 0;
    bool seen = false;
    int depth = 0;
    for (std::size_t i = open + 1; i < close; ++i) {
        const Token& t = toks[i];
        if (is_delim(t, "(") || is_delim(t, "[") || is_delim(t, "{")) ++depth;
        else if (is_delim(t, ")") || is_delim(t, "]") || is_delim(t, "}")) --depth;
        else if (is_kw(t, "lambda")) {
            int inner = 0;
            while (i < close) {
                const Token& u = toks[i];
                if (is_delim(u, "(") || is_delim(u, "[") || is_delim(u, "{")) ++inner;
                else if (is_delim(u, ")") || is_delim(u, "]") || is_delim(u, "}")) --inner;
                else if (inner == 0 && is_delim(u, ":")) break;
                ++i;
            }
            seen = true;
            continue;
        }
        if (depth == 0 && is_delim(t, ",")) {
            if (seen) ++items;
            seen = false;
        } else if (t.kind != TokenKind::Comment) {
            seen = true;
        }
    }
    if (seen) ++items;
    return items;
}

// Lambda parameters run from the keyword to the first colon outside any
// bracket opened after it.
long count_lambda_params(const std::vector<Token>& toks, std::size_t lambda_pos, std::size_t* end) {
    int depth = 0;
    long items = 0;
    bool seen = false;
    std::size_t i = lambda_pos + 1;
    for (; i < toks.size(); ++i) {
        const Token& t = toks[i];
        if (is_delim(t, "(") || is_delim(t, "[") || is_delim(t, "{")) {
            ++depth;
            seen = true;
        } else if (is_delim(t, ")") || is_delim(t, "]") || is_delim(t, "}")) {
            if (depth == 0) break;  // closing an enclosing bracket
            --depth;
        } else if (depth == 0 && is_delim(t, ":")) {
            break;
        } else if (depth == 0 && is_delim(t, ",")) {
            if (seen) ++items;
            seen = false;
        } else if (t.kind != TokenKind::Comment) {
            seen = true;
        }
    }
    if (seen) ++items;
    *end = i;
    return items;
}

LineMetrics line_metrics_over(std::string_view source, const std::vector<Token>& tokens) {
    LineMetrics m;
    auto lines = physical_lines(source);
    m.loc = static_cast<long>(lines.size());
    long total_len = 0;
    for (auto line : lines) {
        if (is_blank(line)) ++m.blc;
        total_len += codepoints(line);
    }
    m.allc = m.loc > 0 ? static_cast<double>(total_len) / static_cast<double>(m.loc) : 0.0;

    std::set<int> comment_lines;
    for (const Token& t : tokens) {
        if (t.kind != TokenKind::Comment) continue;
        comment_lines.insert(t.line);
        std::string_view body = t.text;
        while (!body.empty() && body.front() == '#') body.remove_prefix(1);
        m.cw += word_count(body);
    }
    m.locom = static_cast<long>(comment_lines.size());
    return m;
}

StatementMetrics statement_metrics_over(const std::vector<Token>& tokens) {
    StatementMetrics m;
    for (const auto& ll : split_logical_lines(tokens)) {
        auto toks = without_comments(ll.tokens);
        if (toks.empty()) continue;

        // else/finally clauses introduce no statement of their own
        bool clause_only = is_kw(toks.front(), "else") || is_kw(toks.front(), "finally");
        if (!clause_only) ++m.statements;
        for (std::size_t i = 0; i < toks.size(); ++i) {
            if (is_delim(toks[i], ";") && i + 1 < toks.size()) ++m.statements;
        }

        for (std::size_t i = 0; i < toks.size(); ++i) {
            if (is_kw(toks[i], "def") && i + 1 < toks.size() &&
                toks[i + 1].kind == TokenKind::Identifier) {
                ++m.udf;
                // the header's parameter list, if present
                std::size_t open = i + 2;
                if (open < toks.size() && is_delim(toks[open], "(")) {
                    int depth = 0;
                    std::size_t close = open;
                    for (std::size_t j = open; j < toks.size(); ++j) {
                        if (is_delim(toks[j], "(")) ++depth;
                        else if (is_delim(toks[j], ")") && --depth == 0) {
                            close = j;
                            break;
                        }
                    }
                    if (close > open) m.parameters += count_param_items(toks, open, close);
                }
            } else if (is_kw(toks[i], "lambda")) {
                std::size_t end = i;
                m.parameters += count_lambda_params(toks, i, &end);
                // keep scanning inside the lambda body for nested defs/lambdas
            }
        }
    }
    return m;
}

ComplexityMetrics complexity_metrics_over(std::string_view source,
                                          const std::vector<Token>& tokens) {
    ComplexityMetrics m;
    if (source.empty()) return m;

    long decisions = 0;
    long depth = 0;
    for (const Token& t : tokens) {
        if (t.kind == TokenKind::KeywordOperator && (t.text == "and" || t.text == "or"))
            ++decisions;
        else if (t.kind == TokenKind::KeywordOther && kDecisionKeywords.count(t.text))
            ++decisions;
        else if (t.kind == TokenKind::Indent)
            m.nbd = std::max(m.nbd, ++depth);
        else if (t.kind == TokenKind::Dedent)
            --depth;
    }
    m.cyc = 1 + decisions;

    // KLCID: normalize each code line to its structural kind; identifiers
    // collapse to ID and literals to LIT so renaming cannot split kinds.
    std::map<std::string, long> kind_identifier_count;
    for (const auto& ll : split_logical_lines(tokens)) {
        std::string normalized;
        long ids = 0;
        bool any = false;
        for (const Token& t : ll.tokens) {
            if (t.kind == TokenKind::Comment) continue;
            any = true;
            if (!normalized.empty()) normalized.push_back(' ');
            if (t.kind == TokenKind::Identifier) {
                normalized += "ID";
                ++ids;
            } else if (t.kind == TokenKind::NumberLiteral ||
                       t.kind == TokenKind::StringLiteral || is_literal_keyword(t)) {
                normalized += "LIT";
            } else {
                normalized += t.text;
            }
        }
        if (!any) continue;
        kind_identifier_count.emplace(normalized, ids);  // first occurrence wins
    }
    long id_sum = 0;
    long kinds_with_ids = 0;
    for (const auto& [kind, ids] : kind_identifier_count) {
        if (ids > 0) {
            id_sum += ids;
            ++kinds_with_ids;
        }
    }
    m.klcid = kinds_with_ids > 0 ? static_cast<double>(id_sum) / static_cast<double>(kinds_with_ids) : 0.0;
    return m;
}

HalsteadMetrics halstead_metrics_over(const std::vector<Token>& tokens) {
    HalsteadMetrics m;
    std::unordered_set<std::string> operand_texts;
    std::unordered_set<std::string> operator_texts;
    for (const Token& t : tokens) {
        bool operand = t.kind == TokenKind::Identifier ||
                       t.kind == TokenKind::NumberLiteral ||
                       t.kind == TokenKind::StringLiteral || is_literal_keyword(t);
        bool op = t.kind == TokenKind::Operator ||
                  t.kind == TokenKind::KeywordOperator ||
                  (t.kind == TokenKind::KeywordOther && kFlowOperatorKeywords.count(t.text));
        if (operand) {
            ++m.operands;
            operand_texts.insert(t.text);
        } else if (op) {
            ++m.operators;
            operator_texts.insert(t.text);
        }
    }
    m.unique_operands = static_cast<long>(operand_texts.size());
    m.unique_operators = static_cast<long>(operator_texts.size());
    return m;
}

IdentifierMetrics identifier_metrics_over(const std::vector<Token>& tokens,
                                          const LineMetrics& lm) {
    IdentifierMetrics m;
    for (const Token& t : tokens)
        if (t.kind == TokenKind::Identifier) ++m.identifiers;
    long nonblank = lm.loc - lm.blc;
    m.aid = nonblank > 0 ? static_cast<double>(m.identifiers) / static_cast<double>(nonblank) : 0.0;
    return m;
}

}  // namespace

LineMetrics line_metrics(std::string_view source) {
    return line_metrics_over(source, tokenize(source));
}

StatementMetrics statement_metrics(std::string_view source) {
    return statement_metrics_over(tokenize(source));
}

ComplexityMetrics complexity_metrics(std::string_view source) {
    return complexity_metrics_over(source, tokenize(source));
}

HalsteadMetrics halstead_metrics(std::string_view source) {
    return halstead_metrics_over(tokenize(source));
}

IdentifierMetrics identifier_metrics(std::string_view source) {
    auto tokens = tokenize(source);
    return identifier_metrics_over(tokens, line_metrics_over(source, tokens));
}

// One lexer pass shared by all five metric groups; corpus extraction is
// dominated by tokenization.
ScriptMetrics script_metrics(std::string_view source) {
    auto tokens = tokenize(source);
    ScriptMetrics m;
    LineMetrics lm = line_metrics_over(source, tokens);
    StatementMetrics sm = statement_metrics_over(tokens);
    ComplexityMetrics cm = complexity_metrics_over(source, tokens);
    HalsteadMetrics hm = halstead_metrics_over(tokens);
    IdentifierMetrics im = identifier_metrics_over(tokens, lm);
    m.loc = lm.loc;
    m.blc = lm.blc;
    m.locom = lm.locom;
    m.cw = lm.cw;
    m.allc = lm.allc;
    m.statements = sm.statements;
    m.parameters = sm.parameters;
    m.udf = sm.udf;
    m.cyc = cm.cyc;
    m.nbd = cm.nbd;
    m.klcid = cm.klcid;
    m.operands = hm.operands;
    m.operators = hm.operators;
    m.unique_operands = hm.unique_operands;
    m.unique_operators = hm.unique_operators;
    m.identifiers = im.identifiers;
    m.aid = im.aid;
    return m;
}

}  // namespace nblens
