#include "nblens/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "nblens/errors.hpp"

namespace nblens {

namespace {

// Interpolated quantile (the usual linear "type 7" rule) for the fences.
double quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    double h = q * static_cast<double>(sorted.size() - 1);
    std::size_t lo = static_cast<std::size_t>(std::floor(h));
    std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

// Tukey clip + min-max scale, preserving key order.
std::map<std::string, double> clip_and_scale(const std::map<std::string, double>& values) {
    std::vector<double> sorted;
    sorted.reserve(values.size());
    for (const auto& [id, v] : values) sorted.push_back(v);
    std::sort(sorted.begin(), sorted.end());
    double q1 = quantile(sorted, 0.25);
    double q3 = quantile(sorted, 0.75);
    double iqr = q3 - q1;
    double lo = q1 - 1.5 * iqr;
    double hi = q3 + 1.5 * iqr;

    std::map<std::string, double> clipped;
    double min_v = 0.0, max_v = 0.0;
    bool first = true;
    for (const auto& [id, v] : values) {
        double c = std::clamp(v, lo, hi);
        clipped[id] = c;
        if (first || c < min_v) min_v = c;
        if (first || c > max_v) max_v = c;
        first = false;
    }
    double range = max_v - min_v;
    for (auto& [id, v] : clipped) v = range > 0.0 ? (v - min_v) / range : 0.0;
    return clipped;
}

}  // namespace

double uocu(const NotebookMetadata& meta, const std::vector<CommentRecord>& scored,
            const ScoringConfig& cfg) {
    if (meta.total_views < cfg.min_views)
        fail("BelowViewFloor", meta.notebook_id + " has " + std::to_string(meta.total_views) +
                                   " views, floor is " + std::to_string(cfg.min_views));
    double sum = 0.0;
    for (const auto& c : scored) {
        if (!c.relevance.has_value())
            fail("UnscoredComment", "comment " + c.comment_id + " has no relevance score");
        sum += static_cast<double>(*c.relevance) * (static_cast<double>(c.upvotes) + 1.0);
    }
    return (sum + cfg.alpha) / std::sqrt(static_cast<double>(meta.total_views));
}

double upvote_score(const NotebookMetadata& meta) {
    return static_cast<double>(meta.total_votes);
}

std::map<std::string, double> hybrid_score(const std::map<std::string, double>& uocu_scores,
                                           const std::map<std::string, double>& upvotes) {
    if (uocu_scores.size() != upvotes.size())
        fail("IdMismatch", "criteria cover different notebook sets");
    for (const auto& [id, v] : uocu_scores)
        if (!upvotes.count(id)) fail("IdMismatch", "upvote criterion misses " + id);
    if (uocu_scores.size() < 4)
        fail("BatchTooSmall", "hybrid scoring needs at least 4 notebooks");

    auto scaled_uocu = clip_and_scale(uocu_scores);
    auto scaled_votes = clip_and_scale(upvotes);
    std::map<std::string, double> hybrid;
    for (const auto& [id, v] : scaled_uocu) hybrid[id] = v + scaled_votes.at(id);
    return hybrid;
}

const std::vector<std::string>& label_names(LabelMode mode) {
    static const std::vector<std::string> binary = {"NCU", "GCU"};
    static const std::vector<std::string> ternary = {"L0", "L1", "L2"};
    static const std::vector<std::string> quaternary = {"Q1", "Q2", "Q3", "Q4"};
    switch (mode) {
        case LabelMode::Binary: return binary;
        case LabelMode::Ternary: return ternary;
        default: return quaternary;
    }
}

std::vector<LabeledExample> discretize(const std::map<std::string, double>& scores, LabelMode mode) {
    std::size_t bins = mode == LabelMode::Ternary ? 3 : 4;
    if (scores.size() < bins)
        fail("BatchTooSmall", "need at least " + std::to_string(bins) + " notebooks, got " +
                                  std::to_string(scores.size()));

    std::vector<std::pair<std::string, double>> ranked(scores.begin(), scores.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second < b.second;
        return a.first < b.first;
    });

    // Equal bins; the first n % bins bins take one extra element each.
    std::size_t n = ranked.size();
    std::size_t base = n / bins;
    std::size_t extra = n % bins;
    std::vector<LabeledExample> out;
    std::size_t pos = 0;
    for (std::size_t b = 0; b < bins; ++b) {
        std::size_t size = base + (b < extra ? 1 : 0);
        for (std::size_t k = 0; k < size; ++k, ++pos) {
            const auto& [id, score] = ranked[pos];
            if (mode == LabelMode::Binary) {
                if (b == 0)
                    out.push_back({id, score, "NCU"});
                else if (b == bins - 1)
                    out.push_back({id, score, "GCU"});
            } else {
                out.push_back({id, score, label_names(mode)[b]});
            }
        }
    }
    return out;
}

std::map<std::string, NotebookMetadata> metadata_from_csv(const std::vector<std::vector<std::string>>& rows) {
    if (rows.empty() ||
        rows.front() != std::vector<std::string>{"notebook_id", "author_id", "total_views",
                                                 "total_votes", "performance_tier"})
        fail("CsvFormat", "unexpected metadata CSV header");
    std::map<std::string, NotebookMetadata> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != 5) fail("CsvFormat", "metadata row " + std::to_string(i) + " has wrong arity");
        NotebookMetadata m;
        m.notebook_id = row[0];
        m.author_id = row[1];
        m.total_views = std::stol(row[2]);
        m.total_votes = std::stol(row[3]);
        m.performance_tier = std::stoi(row[4]);
        out[m.notebook_id] = std::move(m);
    }
    return out;
}

}  // namespace nblens
