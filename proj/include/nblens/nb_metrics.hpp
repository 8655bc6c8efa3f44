#pragma once

#include <array>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nblens/notebook.hpp"
#include "nblens/script_metrics.hpp"

namespace nblens {

// Repository-side facts about a notebook; only performance_tier feeds the
// metric vector, the rest drives scoring.
struct NotebookMetadata {
    std::string notebook_id;
    std::string author_id;
    long total_views = 0;
    long total_votes = 0;
    int performance_tier = 0;  // 0..4
};

struct StructureMetrics {
    long code_cells = 0;
    double mean_lines_per_code_cell = 0.0;
    long executed_cells = 0;
    long visual_outputs = 0;
    long imports = 0;
};

struct MarkdownMetrics {
    long markdown_cells = 0;
    long markdown_words = 0;
    double mean_words_per_cell = 0.0;
    long markdown_lines = 0;
    double mean_lines_per_cell = 0.0;
    long h1 = 0, h2 = 0, h3 = 0;
};

struct DispersionMetrics {
    double markdown_cv = 0.0;  // DMC
    double import_cv = 0.0;    // DI
};

// Corpus import-frequency scores in (0, 1]; unknown modules score 0.
struct PopularityTable {
    std::map<std::string, double> scores;
    long corpus_size = 0;
};

// Accumulates distinct-module counts; merging partial builders is
// associative and commutative, so corpus partitioning cannot change the
// resulting table.
class PopularityBuilder {
public:
    void add(const Notebook& nb);
    void merge(const PopularityBuilder& other);
    PopularityTable finalize() const;  // errors: EmptyCorpus

private:
    std::map<std::string, long> counts_;
    long corpus_size_ = 0;
};

PopularityTable build_api_popularity(std::span<const Notebook> corpus);

// JSON persistence for reuse between extraction runs and by the service.
void save_popularity(const PopularityTable& table, const std::string& path);
PopularityTable load_popularity(const std::string& path);

// Population sigma/mu; fewer than 2 samples or mu == 0 yields 0.
// Errors: NegativeInput.
double coefficient_of_variation(std::span<const double> values);

// Top-level module names of every import statement in one cell, with
// multiplicity. A from-import contributes its source module once; a purely
// relative import contributes ".".
std::vector<std::string> imported_modules(std::string_view cell_source);

extern const std::set<std::string> kDefaultVisualizationMimes;

StructureMetrics structure_metrics(const Notebook& nb,
                                   const std::set<std::string>& visualization_mimes = kDefaultVisualizationMimes);
MarkdownMetrics markdown_metrics(const Notebook& nb);
DispersionMetrics dispersion_metrics(const Notebook& nb);
double eap(const Notebook& nb, const PopularityTable& table);

struct NotebookMetrics {
    long cc = 0;
    double mean_lcc = 0.0;
    long imports = 0;
    double mean_wmc = 0.0;
    long h1 = 0, h2 = 0, h3 = 0;
    long mc = 0;
    double mean_lmc = 0.0;
    long mw = 0, lmc = 0;
    double dmc = 0.0, di = 0.0;
    int pt = 0;
    double eap = 0.0;
    long vdt = 0, ec = 0;
};

// The full 34-value row. Column order is frozen; see metric_names().
struct MetricVector {
    std::string notebook_id;
    ScriptMetrics script;
    NotebookMetrics notebook;

    std::array<double, 34> values() const;
    double value(std::string_view name) const;
};

const std::array<std::string_view, 34>& metric_names();
bool metric_is_integer(std::size_t column);

// Errors: InvalidTier (performance tier outside 0..4).
MetricVector assemble_metric_vector(const Notebook& nb, const NotebookMetadata& meta,
                                    const PopularityTable& table,
                                    const std::set<std::string>& visualization_mimes = kDefaultVisualizationMimes);

// CSV rendering of one row matching the frozen header; reals get 6 decimal
// digits, integers stay bare.
std::vector<std::string> metric_csv_row(const MetricVector& v);
std::vector<std::string> metric_csv_header();

}  // namespace nblens
