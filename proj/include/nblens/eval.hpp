#pragma once

#include <span>
#include <string>
#include <vector>

namespace nblens {

// Binary reports use class 1 as positive (the pipeline maps GCU there).
// Multiclass reports macro-average precision/recall; f1 stays the harmonic
// mean of the reported precision and recall. Degenerate denominators yield 0
// plus a flag instead of an error.
struct EvalReport {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double auc_roc = 0.0;
    std::vector<int> classes;
    std::vector<std::vector<long>> confusion;  // confusion[truth][pred]
    std::vector<std::string> flags;
};

// scores are positive-class scores (used only for AUC; may be empty for
// multiclass truth). Errors: LengthMismatch.
EvalReport evaluate(std::span<const double> scores, std::span<const int> predicted,
                    std::span<const int> truth);

// Rank-statistic AUC with ties counted as half. Errors: LengthMismatch.
double auc_roc(std::span<const double> scores, std::span<const int> truth);

// (p_o - p_e) / (1 - p_e); 1.0 when both raters agree everywhere and chance
// agreement saturates. Errors: LengthMismatch (also covers empty input).
double cohen_kappa(std::span<const int> a, std::span<const int> b);

// counts: item x category rating counts, each row summing to n_raters.
// Errors: RowSumMismatch.
double fleiss_kappa(const std::vector<std::vector<long>>& counts, long n_raters);

}  // namespace nblens
