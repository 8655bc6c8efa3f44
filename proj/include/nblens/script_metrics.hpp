#pragma once

#include <string_view>

namespace nblens {

struct LineMetrics {
    long loc = 0;       // physical lines
    long blc = 0;       // blank or whitespace-only lines
    long locom = 0;     // lines holding a comment, full-line or trailing
    long cw = 0;        // words over all comment texts, marker stripped
    double allc = 0.0;  // mean line length in codepoints
};

struct StatementMetrics {
    long statements = 0;  // logical statements
    long parameters = 0;  // formal parameters, named defs and lambdas
    long udf = 0;         // named function definition headers
};

struct ComplexityMetrics {
    long cyc = 0;        // 1 + decision points; 0 for empty source
    long nbd = 0;        // max block nesting depth, module level = 0
    double klcid = 0.0;  // identifier density over structurally unique lines
};

struct HalsteadMetrics {
    long operands = 0;
    long operators = 0;
    long unique_operands = 0;
    long unique_operators = 0;
};

struct IdentifierMetrics {
    long identifiers = 0;
    double aid = 0.0;  // identifiers per non-blank line
};

LineMetrics line_metrics(std::string_view source);
StatementMetrics statement_metrics(std::string_view source);
ComplexityMetrics complexity_metrics(std::string_view source);
HalsteadMetrics halstead_metrics(std::string_view source);
IdentifierMetrics identifier_metrics(std::string_view source);

// All 17 script-based metrics of one notebook's concatenated code.
struct ScriptMetrics {
    long loc = 0, blc = 0, locom = 0, cw = 0;
    long statements = 0, parameters = 0, udf = 0;
    long cyc = 0, nbd = 0;
    double klcid = 0.0;
    long operands = 0, operators = 0, unique_operands = 0, unique_operators = 0;
    double allc = 0.0;
    long identifiers = 0;
    double aid = 0.0;
};

ScriptMetrics script_metrics(std::string_view source);

}  // namespace nblens
