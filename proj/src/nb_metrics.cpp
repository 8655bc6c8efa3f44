#include "nblens/nb_metrics.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "nblens/csv.hpp"
#include "nblens/errors.hpp"
#include "nblens/tokenizer.hpp"

namespace nblens {

namespace {

long whitespace_words(std::string_view text) {
    long words = 0;
    bool in_word = false;
    for (unsigned char c : text) {
        bool ws = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
        if (!ws && !in_word) ++words;
        in_word = !ws;
    }
    return words;
}

// Markdown words exclude heading markers: a leading hash run (after at most
// 3 spaces of indent) is stripped per line before whitespace counting.
long markdown_word_count(std::string_view source) {
    long words = 0;
    for (auto line : physical_lines(source)) {
        std::size_t i = 0;
        while (i < line.size() && i < 3 && line[i] == ' ') ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] == '#') ++j;
        words += whitespace_words(j > i ? line.substr(j) : line);
    }
    return words;
}

// Heading: up to 3 leading spaces, exactly k hashes, then one space.
int heading_level(std::string_view line) {
    std::size_t i = 0;
    while (i < line.size() && i < 3 && line[i] == ' ') ++i;
    std::size_t hashes = 0;
    while (i < line.size() && line[i] == '#') {
        ++hashes;
        ++i;
    }
    if (hashes < 1 || hashes > 3) return 0;
    if (i >= line.size() || line[i] != ' ') return 0;
    return static_cast<int>(hashes);
}

bool is_delim(const Token& t, std::string_view text) {
    return t.kind == TokenKind::Delimiter && t.text == text;
}

bool is_kw(const Token& t, std::string_view word) {
    return t.kind == TokenKind::KeywordOther && t.text == word;
}

// Statements of a logical line, split on top-level semicolons.
std::vector<std::vector<Token>> semicolon_parts(const std::vector<Token>& tokens) {
    std::vector<std::vector<Token>> parts(1);
    for (const Token& t : tokens) {
        if (t.kind == TokenKind::Comment) continue;
        if (is_delim(t, ";")) {
            parts.emplace_back();
        } else {
            parts.back().push_back(t);
        }
    }
    return parts;
}

void scan_import_statement(const std::vector<Token>& toks, std::vector<std::string>* out) {
    if (toks.empty()) return;
    if (is_kw(toks.front(), "import")) {
        // import a.b as c, d  ->  a, d
        bool expect_name = true;
        int depth = 0;
        for (std::size_t i = 1; i < toks.size(); ++i) {
            const Token& t = toks[i];
            if (is_delim(t, "(") || is_delim(t, "[") || is_delim(t, "{")) ++depth;
            else if (is_delim(t, ")") || is_delim(t, "]") || is_delim(t, "}")) --depth;
            else if (depth == 0 && is_delim(t, ",")) expect_name = true;
            else if (expect_name && t.kind == TokenKind::Identifier) {
                out->push_back(t.text);
                expect_name = false;
            }
        }
    } else if (is_kw(toks.front(), "from")) {
        // from .pkg.sub import x  ->  pkg ; from . import x  ->  "."
        bool saw_dot = false;
        for (std::size_t i = 1; i < toks.size(); ++i) {
            const Token& t = toks[i];
            if (t.kind == TokenKind::Identifier) {
                out->push_back(t.text);
                return;
            }
            if (is_kw(t, "import")) break;
            if (is_delim(t, ".")) saw_dot = true;
        }
        if (saw_dot) out->push_back(".");
    }
}

}  // namespace

const std::set<std::string> kDefaultVisualizationMimes = {
    "image/png",
    "image/jpeg",
    "image/gif",
    "image/bmp",
    "image/webp",
    "image/svg+xml",
    "application/vnd.plotly.v1+json",
    "application/vnd.vega.v3+json",
    "application/vnd.vega.v4+json",
    "application/vnd.vega.v5+json",
    "application/vnd.vegalite.v2+json",
    "application/vnd.vegalite.v3+json",
    "application/vnd.vegalite.v4+json",
    "application/vnd.bokehjs_exec.v0+json",
};

double coefficient_of_variation(std::span<const double> values) {
    for (double v : values)
        if (v < 0.0) fail("NegativeInput", "coefficient of variation over negative value");
    if (values.size() < 2) return 0.0;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    if (mean == 0.0) return 0.0;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size());
    return std::sqrt(var) / mean;
}

std::vector<std::string> imported_modules(std::string_view cell_source) {
    std::vector<std::string> out;
    for (const auto& ll : split_logical_lines(tokenize(cell_source)))
        for (const auto& part : semicolon_parts(ll.tokens))
            scan_import_statement(part, &out);
    return out;
}

namespace {

// One import scan per notebook, shared by I, DI and EAP so assembly does
// not re-tokenize every code cell three times.
struct ImportScan {
    std::vector<double> per_code_cell;
    std::set<std::string> distinct;
    long total = 0;
};

ImportScan scan_imports(const Notebook& nb) {
    ImportScan scan;
    for (const Cell& cell : nb.cells) {
        if (cell.kind != CellKind::Code) continue;
        auto names = imported_modules(cell.source);
        scan.per_code_cell.push_back(static_cast<double>(names.size()));
        scan.total += static_cast<long>(names.size());
        for (auto& name : names) scan.distinct.insert(std::move(name));
    }
    return scan;
}

StructureMetrics structure_metrics_over(const Notebook& nb,
                                        const std::set<std::string>& visualization_mimes,
                                        const ImportScan& imports) {
    StructureMetrics m;
    long total_lines = 0;
    for (const Cell& cell : nb.cells) {
        if (cell.kind != CellKind::Code) continue;
        ++m.code_cells;
        total_lines += static_cast<long>(physical_lines(cell.source).size());
        if (cell.execution_count.has_value()) ++m.executed_cells;
        for (const OutputBundle& out : cell.outputs) {
            for (const std::string& key : out.mime_keys) {
                if (visualization_mimes.count(key)) {
                    ++m.visual_outputs;
                    break;
                }
            }
        }
    }
    m.imports = imports.total;
    m.mean_lines_per_code_cell =
        m.code_cells > 0 ? static_cast<double>(total_lines) / static_cast<double>(m.code_cells) : 0.0;
    return m;
}

double eap_over(const ImportScan& imports, const PopularityTable& table) {
    double total = 0.0;
    for (const auto& name : imports.distinct) {
        auto it = table.scores.find(name);
        if (it != table.scores.end()) total += it->second;
    }
    return total;
}

}  // namespace

StructureMetrics structure_metrics(const Notebook& nb,
                                   const std::set<std::string>& visualization_mimes) {
    return structure_metrics_over(nb, visualization_mimes, scan_imports(nb));
}

MarkdownMetrics markdown_metrics(const Notebook& nb) {
    MarkdownMetrics m;
    for (const Cell& cell : nb.cells) {
        if (cell.kind != CellKind::Markdown) continue;
        ++m.markdown_cells;
        m.markdown_words += markdown_word_count(cell.source);
        for (auto line : physical_lines(cell.source)) {
            ++m.markdown_lines;
            switch (heading_level(line)) {
                case 1: ++m.h1; break;
                case 2: ++m.h2; break;
                case 3: ++m.h3; break;
                default: break;
            }
        }
    }
    if (m.markdown_cells > 0) {
        m.mean_words_per_cell = static_cast<double>(m.markdown_words) / static_cast<double>(m.markdown_cells);
        m.mean_lines_per_cell = static_cast<double>(m.markdown_lines) / static_cast<double>(m.markdown_cells);
    }
    return m;
}

namespace {

DispersionMetrics dispersion_metrics_over(const Notebook& nb, const ImportScan& imports) {
    DispersionMetrics m;
    std::vector<double> md_words;
    for (const Cell& cell : nb.cells)
        if (cell.kind == CellKind::Markdown)
            md_words.push_back(static_cast<double>(markdown_word_count(cell.source)));
    m.markdown_cv = coefficient_of_variation(md_words);
    m.import_cv = coefficient_of_variation(imports.per_code_cell);
    return m;
}

}  // namespace

DispersionMetrics dispersion_metrics(const Notebook& nb) {
    return dispersion_metrics_over(nb, scan_imports(nb));
}

void PopularityBuilder::add(const Notebook& nb) {
    std::set<std::string> distinct;
    for (const Cell& cell : nb.cells)
        if (cell.kind == CellKind::Code)
            for (auto& name : imported_modules(cell.source)) distinct.insert(std::move(name));
    for (const auto& name : distinct) ++counts_[name];
    ++corpus_size_;
}

void PopularityBuilder::merge(const PopularityBuilder& other) {
    for (const auto& [name, count] : other.counts_) counts_[name] += count;
    corpus_size_ += other.corpus_size_;
}

PopularityTable PopularityBuilder::finalize() const {
    if (corpus_size_ == 0) fail("EmptyCorpus", "popularity table over an empty corpus");
    PopularityTable table;
    table.corpus_size = corpus_size_;
    for (const auto& [name, count] : counts_)
        table.scores[name] = static_cast<double>(count) / static_cast<double>(corpus_size_);
    return table;
}

PopularityTable build_api_popularity(std::span<const Notebook> corpus) {
    PopularityBuilder builder;
    for (const Notebook& nb : corpus) builder.add(nb);
    return builder.finalize();
}

void save_popularity(const PopularityTable& table, const std::string& path) {
    nlohmann::json doc;
    doc["corpus_size"] = table.corpus_size;
    doc["scores"] = table.scores;
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("IoError", "cannot write " + path);
    out << doc.dump(1) << '\n';
}

PopularityTable load_popularity(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("IoError", "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    nlohmann::json doc = nlohmann::json::parse(buf.str(), nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("corpus_size") ||
        !doc.contains("scores"))
        fail("PopularityFormat", "bad popularity table: " + path);
    PopularityTable table;
    table.corpus_size = doc["corpus_size"].get<long>();
    if (table.corpus_size < 1) fail("PopularityFormat", "corpus_size must be positive");
    for (auto it = doc["scores"].begin(); it != doc["scores"].end(); ++it)
        table.scores[it.key()] = it.value().get<double>();
    return table;
}

double eap(const Notebook& nb, const PopularityTable& table) {
    return eap_over(scan_imports(nb), table);
}

const std::array<std::string_view, 34>& metric_names() {
    static const std::array<std::string_view, 34> names = {
        "LOC",    "BLC",     "LOCom",   "CW",     "S",      "P",
        "UDF",    "CyC",     "NBD",     "KLCID",  "OPRND",  "OPRAT",
        "UOPRND", "UOPRAT",  "ALLC",    "ID",     "AID",    "CC",
        "MeanLCC", "I",      "MeanWMC", "H1",     "H2",     "H3",
        "MC",     "MeanLMC", "MW",      "LMC",    "DMC",    "DI",
        "PT",     "EAP",     "VDT",     "EC"};
    return names;
}

bool metric_is_integer(std::size_t column) {
    static const std::array<bool, 34> integral = {
        true,  true,  true,  true,  true,  true,   // LOC..P
        true,  true,  true,  false, true,  true,   // UDF..OPRAT (KLCID real)
        true,  true,  false, true,  false, true,   // UOPRND..CC (ALLC, AID real)
        false, true,  false, true,  true,  true,   // MeanLCC, I, MeanWMC, H1..H3
        true,  false, true,  true,  false, false,  // MC, MeanLMC, MW, LMC, DMC, DI
        true,  false, true,  true};                // PT, EAP, VDT, EC
    return integral[column];
}

std::array<double, 34> MetricVector::values() const {
    return {
        static_cast<double>(script.loc),
        static_cast<double>(script.blc),
        static_cast<double>(script.locom),
        static_cast<double>(script.cw),
        static_cast<double>(script.statements),
        static_cast<double>(script.parameters),
        static_cast<double>(script.udf),
        static_cast<double>(script.cyc),
        static_cast<double>(script.nbd),
        script.klcid,
        static_cast<double>(script.operands),
        static_cast<double>(script.operators),
        static_cast<double>(script.unique_operands),
        static_cast<double>(script.unique_operators),
        script.allc,
        static_cast<double>(script.identifiers),
        script.aid,
        static_cast<double>(notebook.cc),
        notebook.mean_lcc,
        static_cast<double>(notebook.imports),
        notebook.mean_wmc,
        static_cast<double>(notebook.h1),
        static_cast<double>(notebook.h2),
        static_cast<double>(notebook.h3),
        static_cast<double>(notebook.mc),
        notebook.mean_lmc,
        static_cast<double>(notebook.mw),
        static_cast<double>(notebook.lmc),
        notebook.dmc,
        notebook.di,
        static_cast<double>(notebook.pt),
        notebook.eap,
        static_cast<double>(notebook.vdt),
        static_cast<double>(notebook.ec),
    };
}

double MetricVector::value(std::string_view name) const {
    const auto& names = metric_names();
    auto vals = values();
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return vals[i];
    fail("UnknownMetric", std::string(name));
}

MetricVector assemble_metric_vector(const Notebook& nb, const NotebookMetadata& meta,
                                    const PopularityTable& table,
                                    const std::set<std::string>& visualization_mimes) {
    if (meta.performance_tier < 0 || meta.performance_tier > 4)
        fail("InvalidTier", "performance tier " + std::to_string(meta.performance_tier) +
                                " outside 0..4 for " + nb.notebook_id);
    MetricVector v;
    v.notebook_id = nb.notebook_id;
    v.script = script_metrics(concat_code(nb));

    ImportScan imports = scan_imports(nb);
    StructureMetrics st = structure_metrics_over(nb, visualization_mimes, imports);
    MarkdownMetrics md = markdown_metrics(nb);
    DispersionMetrics disp = dispersion_metrics_over(nb, imports);

    v.notebook.cc = st.code_cells;
    v.notebook.mean_lcc = st.mean_lines_per_code_cell;
    v.notebook.imports = st.imports;
    v.notebook.ec = st.executed_cells;
    v.notebook.vdt = st.visual_outputs;
    v.notebook.mc = md.markdown_cells;
    v.notebook.mw = md.markdown_words;
    v.notebook.mean_wmc = md.mean_words_per_cell;
    v.notebook.lmc = md.markdown_lines;
    v.notebook.mean_lmc = md.mean_lines_per_cell;
    v.notebook.h1 = md.h1;
    v.notebook.h2 = md.h2;
    v.notebook.h3 = md.h3;
    v.notebook.dmc = disp.markdown_cv;
    v.notebook.di = disp.import_cv;
    v.notebook.pt = meta.performance_tier;
    v.notebook.eap = eap_over(imports, table);
    return v;
}

std::vector<std::string> metric_csv_header() {
    std::vector<std::string> header;
    header.emplace_back("notebook_id");
    for (auto name : metric_names()) header.emplace_back(name);
    return header;
}

std::vector<std::string> metric_csv_row(const MetricVector& v) {
    std::vector<std::string> row;
    row.push_back(v.notebook_id);
    auto vals = v.values();
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (metric_is_integer(i))
            row.push_back(csv::format_int(static_cast<long long>(std::llround(vals[i]))));
        else
            row.push_back(csv::format_real(vals[i]));
    }
    return row;
}

}  // namespace nblens
