#pragma once

#include <map>
#include <string>
#include <vector>

#include "nblens/comments.hpp"
#include "nblens/nb_metrics.hpp"

namespace nblens {

struct ScoringConfig {
    double alpha = 5.0;
    long min_views = 500;
};

// [sum of relevance_i * (upvotes_i + 1) + alpha] / sqrt(total_views).
// Errors: BelowViewFloor, UnscoredComment.
double uocu(const NotebookMetadata& meta, const std::vector<CommentRecord>& scored,
            const ScoringConfig& cfg = {});

double upvote_score(const NotebookMetadata& meta);

// Clips each criterion to its Tukey fences, min-max scales it over the
// batch, and sums the two scaled values per notebook.
// Errors: IdMismatch, BatchTooSmall (needs >= 4 notebooks).
std::map<std::string, double> hybrid_score(const std::map<std::string, double>& uocu_scores,
                                           const std::map<std::string, double>& upvotes);

enum class LabelMode { Binary, Ternary, Quaternary };

struct LabeledExample {
    std::string notebook_id;
    double score = 0.0;
    std::string label;
};

// Rank-based equal binning (sizes differ by at most one, lower bins take the
// extras, ties broken by id). Binary keeps only the outer quartiles as
// NCU/GCU; ternary and quaternary label every bin.
// Errors: BatchTooSmall.
std::vector<LabeledExample> discretize(const std::map<std::string, double>& scores, LabelMode mode);

const std::vector<std::string>& label_names(LabelMode mode);

// metadata CSV: notebook_id,author_id,total_views,total_votes,performance_tier
std::map<std::string, NotebookMetadata> metadata_from_csv(const std::vector<std::vector<std::string>>& rows);

}  // namespace nblens
