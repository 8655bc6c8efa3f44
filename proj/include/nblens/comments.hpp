#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nblens/nb_metrics.hpp"

namespace nblens {

struct CommentRecord {
    std::string comment_id;
    std::string notebook_id;
    std::string author_id;
    std::optional<std::string> parent_comment_id;  // set = reply
    std::string text;
    long upvotes = 0;
    std::optional<int> relevance;  // 0 or 1 once scored

    bool operator==(const CommentRecord&) const = default;
};

struct CleaningConfig {
    double english_letter_ratio_min = 0.90;
    double length_percentile_cut = 99.0;  // (0, 100]
};

// Drops non-English comments, over-long comments (above the nearest-rank
// length percentile of the input corpus), author self-comments and replies.
// Retained records pass through untouched, in order.
// Errors: UnknownNotebook.
std::vector<CommentRecord> clean_comments(const std::vector<CommentRecord>& comments,
                                          const std::map<std::string, NotebookMetadata>& meta,
                                          const CleaningConfig& cfg = {});

// Latin-letter share among alphabetic codepoints; 1.0 when there are none.
double english_letter_ratio(std::string_view text);

// Case-insensitive substring lexicon; any hit marks the comment relevant.
using Lexicon = std::vector<std::string>;
const Lexicon& default_lexicon();
int lexicon_classify(std::string_view text, const Lexicon& lexicon);

// Bag-of-words logistic model over lowercased word unigrams.
struct LinearTextModel {
    std::map<std::string, std::size_t> vocabulary;
    std::vector<double> weights;
    double bias = 0.0;
    double threshold = 0.5;
    std::vector<double> loss_history;  // per-epoch training loss

    double probability(std::string_view text) const;
    int classify(std::string_view text) const;
};

// Deterministic full-batch gradient descent with a step-halving safeguard,
// so the loss never increases between epochs.
// Errors: SingleClassData, TooFewExamples.
LinearTextModel train_linear_classifier(const std::vector<std::pair<std::string, int>>& labeled,
                                        std::uint64_t seed, int epochs = 200);

// Relevance sources for score_comments.
struct LexiconScorer {
    Lexicon lexicon = default_lexicon();
};
struct ModelScorer {
    LinearTextModel model;
};
struct ImportedScores {
    std::map<std::string, int> by_comment_id;
};

// Errors: MissingScore (import mode with an uncovered comment).
std::vector<CommentRecord> score_comments(std::vector<CommentRecord> comments,
                                          const LexiconScorer& scorer);
std::vector<CommentRecord> score_comments(std::vector<CommentRecord> comments,
                                          const ModelScorer& scorer);
std::vector<CommentRecord> score_comments(std::vector<CommentRecord> comments,
                                          const ImportedScores& scores);

// CSV bridges: comment_id,notebook_id,author_id,parent_comment_id,text,upvotes
// and comment_id,relevance.
std::vector<CommentRecord> comments_from_csv(const std::vector<std::vector<std::string>>& rows);
std::map<std::string, int> imported_scores_from_csv(const std::vector<std::vector<std::string>>& rows);

// JSON persistence for trained text models; one phrase per line for lexicons.
void save_text_model(const LinearTextModel& model, const std::string& path);
LinearTextModel load_text_model(const std::string& path);
Lexicon load_lexicon(const std::string& path);

}  // namespace nblens
