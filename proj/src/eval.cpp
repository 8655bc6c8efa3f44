#include "nblens/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "nblens/errors.hpp"

namespace nblens {

namespace {

std::vector<int> sorted_distinct(std::span<const int> a, std::span<const int> b) {
    std::vector<int> out(a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

double auc_roc(std::span<const double> scores, std::span<const int> truth) {
    if (scores.size() != truth.size()) fail("LengthMismatch", "scores and truth disagree");
    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // average ranks over tied scores
    std::vector<double> rank(scores.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
        i = j + 1;
    }

    double rank_sum = 0.0;
    long n_pos = 0;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        if (truth[k] == 1) {
            rank_sum += rank[k];
            ++n_pos;
        }
    }
    long n_neg = static_cast<long>(truth.size()) - n_pos;
    if (n_pos == 0 || n_neg == 0) fail("UndefinedMetric", "AUC needs both classes in truth");
    return (rank_sum - static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0) /
           (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

EvalReport evaluate(std::span<const double> scores, std::span<const int> predicted,
                    std::span<const int> truth) {
    if (predicted.size() != truth.size()) fail("LengthMismatch", "predictions and truth disagree");
    if (!scores.empty() && scores.size() != truth.size())
        fail("LengthMismatch", "scores and truth disagree");
    if (truth.empty()) fail("LengthMismatch", "empty evaluation input");

    EvalReport report;
    report.classes = sorted_distinct(predicted, truth);
    std::map<int, std::size_t> index;
    for (std::size_t k = 0; k < report.classes.size(); ++k) index[report.classes[k]] = k;

    report.confusion.assign(report.classes.size(),
                            std::vector<long>(report.classes.size(), 0));
    long correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ++report.confusion[index[truth[i]]][index[predicted[i]]];
        if (truth[i] == predicted[i]) ++correct;
    }
    report.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());

    bool binary = report.classes.size() <= 2;
    if (binary) {
        long tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < truth.size(); ++i) {
            if (predicted[i] == 1 && truth[i] == 1) ++tp;
            if (predicted[i] == 1 && truth[i] != 1) ++fp;
            if (predicted[i] != 1 && truth[i] == 1) ++fn;
        }
        if (tp + fp == 0) {
            report.flags.push_back("precision_zero_denominator");
        } else {
            report.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        }
        if (tp + fn == 0) {
            report.flags.push_back("recall_zero_denominator");
        } else {
            report.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
        }
    } else {
        // macro averages, one-vs-rest
        double prec_sum = 0.0, rec_sum = 0.0;
        bool prec_degenerate = false, rec_degenerate = false;
        for (std::size_t k = 0; k < report.classes.size(); ++k) {
            long tp = report.confusion[k][k];
            long pred_k = 0, true_k = 0;
            for (std::size_t j = 0; j < report.classes.size(); ++j) {
                pred_k += report.confusion[j][k];
                true_k += report.confusion[k][j];
            }
            if (pred_k == 0)
                prec_degenerate = true;
            else
                prec_sum += static_cast<double>(tp) / static_cast<double>(pred_k);
            if (true_k == 0)
                rec_degenerate = true;
            else
                rec_sum += static_cast<double>(tp) / static_cast<double>(true_k);
        }
        report.precision = prec_sum / static_cast<double>(report.classes.size());
        report.recall = rec_sum / static_cast<double>(report.classes.size());
        if (prec_degenerate) report.flags.push_back("precision_zero_denominator");
        if (rec_degenerate) report.flags.push_back("recall_zero_denominator");
    }

    if (report.precision + report.recall > 0.0)
        report.f1 = 2.0 * report.precision * report.recall / (report.precision + report.recall);
    else
        report.flags.push_back("f1_zero_denominator");

    bool binary_truth = true;
    for (int t : truth)
        if (t != 0 && t != 1) binary_truth = false;
    if (!scores.empty() && binary_truth) {
        try {
            report.auc_roc = auc_roc(scores, truth);
        } catch (const Error&) {
            report.flags.push_back("auc_undefined");
        }
    } else {
        report.flags.push_back("auc_undefined");
    }
    return report;
}

double cohen_kappa(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size() || a.empty())
        fail("LengthMismatch", "rater label vectors must be equal-length and non-empty");
    double n = static_cast<double>(a.size());
    std::map<int, long> counts_a, counts_b;
    long agree = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++counts_a[a[i]];
        ++counts_b[b[i]];
        if (a[i] == b[i]) ++agree;
    }
    double p_o = static_cast<double>(agree) / n;
    double p_e = 0.0;
    for (const auto& [label, ca] : counts_a) {
        auto it = counts_b.find(label);
        if (it != counts_b.end())
            p_e += (static_cast<double>(ca) / n) * (static_cast<double>(it->second) / n);
    }
    if (p_e >= 1.0) return 1.0;  // both raters constant and identical
    return (p_o - p_e) / (1.0 - p_e);
}

double fleiss_kappa(const std::vector<std::vector<long>>& counts, long n_raters) {
    if (counts.empty() || n_raters < 2)
        fail("RowSumMismatch", "need at least one item and two raters");
    std::size_t categories = counts.front().size();
    double n = static_cast<double>(n_raters);
    double items = static_cast<double>(counts.size());

    std::vector<double> category_share(categories, 0.0);
    double p_bar = 0.0;
    for (const auto& row : counts) {
        if (row.size() != categories) fail("RowSumMismatch", "ragged rating matrix");
        long row_sum = 0;
        double sq = 0.0;
        for (std::size_t j = 0; j < categories; ++j) {
            if (row[j] < 0) fail("RowSumMismatch", "negative rating count");
            row_sum += row[j];
            sq += static_cast<double>(row[j]) * static_cast<double>(row[j]);
            category_share[j] += static_cast<double>(row[j]);
        }
        if (row_sum != n_raters)
            fail("RowSumMismatch", "row sums to " + std::to_string(row_sum) + ", expected " +
                                       std::to_string(n_raters));
        p_bar += (sq - n) / (n * (n - 1.0));
    }
    p_bar /= items;

    double p_e = 0.0;
    for (double share : category_share) {
        double p_j = share / (items * n);
        p_e += p_j * p_j;
    }
    if (p_e >= 1.0) return 1.0;
    return (p_bar - p_e) / (1.0 - p_e);
}

}  // namespace nblens
