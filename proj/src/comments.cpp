#include "nblens/comments.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "nblens/errors.hpp"

namespace nblens {

namespace {

std::string to_lower(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return out;
}

// Codepoint count of a comment body.
long codepoint_length(std::string_view text) {
    long n = 0;
    for (unsigned char c : text)
        if ((c & 0xC0) != 0x80) ++n;
    return n;
}

// Nearest-rank percentile over raw lengths.
long length_percentile(std::vector<long> lengths, double percentile) {
    if (lengths.empty()) return 0;
    std::sort(lengths.begin(), lengths.end());
    auto rank = static_cast<std::size_t>(
        std::ceil(percentile / 100.0 * static_cast<double>(lengths.size())));
    if (rank < 1) rank = 1;
    if (rank > lengths.size()) rank = lengths.size();
    return lengths[rank - 1];
}

std::vector<std::string> word_unigrams(std::string_view text) {
    std::vector<std::string> words;
    std::string current;
    for (char raw : text) {
        unsigned char c = static_cast<unsigned char>(raw);
        if (std::isalnum(c) || c >= 0x80) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            words.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) words.push_back(std::move(current));
    return words;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

double english_letter_ratio(std::string_view text) {
    long latin = 0;
    long other = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (c < 0x80) {
            if (std::isalpha(c)) ++latin;
        } else if ((c & 0xC0) != 0x80) {
            // lead byte of a non-ASCII codepoint: treated as a non-Latin letter
            ++other;
        }
    }
    long total = latin + other;
    return total == 0 ? 1.0 : static_cast<double>(latin) / static_cast<double>(total);
}

std::vector<CommentRecord> clean_comments(const std::vector<CommentRecord>& comments,
                                          const std::map<std::string, NotebookMetadata>& meta,
                                          const CleaningConfig& cfg) {
    std::vector<long> lengths;
    lengths.reserve(comments.size());
    for (const auto& c : comments) {
        if (!meta.count(c.notebook_id))
            fail("UnknownNotebook", "comment " + c.comment_id + " references unknown notebook " + c.notebook_id);
        lengths.push_back(codepoint_length(c.text));
    }
    long cut = length_percentile(lengths, cfg.length_percentile_cut);

    std::vector<CommentRecord> kept;
    kept.reserve(comments.size());
    for (const auto& c : comments) {
        if (english_letter_ratio(c.text) < cfg.english_letter_ratio_min) continue;
        if (codepoint_length(c.text) > cut) continue;
        if (c.author_id == meta.at(c.notebook_id).author_id) continue;
        if (c.parent_comment_id.has_value()) continue;
        kept.push_back(c);
    }
    return kept;
}

const Lexicon& default_lexicon() {
    static const Lexicon lexicon = {
        "explained",
        "explanation",
        "informative",
        "best notebook",
        "excellent notebook",
        "cool notebook",
        "clean notebook",
        "helpful notebook",
        "nice example",
        "simple to follow",
        "easy to follow",
        "step by step",
        "learn",
        "nicely organized",
        "well organized",
        "well presented",
        "well structured",
        "well documented",
        "well written",
        "easy to understand",
        "understandable",
        "readable",
        "good eda",
        "nice kernel",
    };
    return lexicon;
}

int lexicon_classify(std::string_view text, const Lexicon& lexicon) {
    if (lexicon.empty()) fail("EmptyLexicon", "lexicon_classify with no patterns");
    std::string lowered = to_lower(text);
    for (const auto& pattern : lexicon)
        if (lowered.find(to_lower(pattern)) != std::string::npos) return 1;
    return 0;
}

double LinearTextModel::probability(std::string_view text) const {
    double z = bias;
    for (const auto& word : word_unigrams(text)) {
        auto it = vocabulary.find(word);
        if (it != vocabulary.end()) z += weights[it->second];
    }
    return sigmoid(z);
}

int LinearTextModel::classify(std::string_view text) const {
    return probability(text) >= threshold ? 1 : 0;
}

LinearTextModel train_linear_classifier(const std::vector<std::pair<std::string, int>>& labeled,
                                        std::uint64_t seed, int epochs) {
    if (labeled.size() < 20)
        fail("TooFewExamples", "need at least 20 labeled comments, got " + std::to_string(labeled.size()));
    bool saw0 = false, saw1 = false;
    for (const auto& [text, label] : labeled) (label == 0 ? saw0 : saw1) = true;
    if (!saw0 || !saw1) fail("SingleClassData", "training data holds a single class");

    LinearTextModel model;
    std::vector<std::vector<std::size_t>> rows;
    rows.reserve(labeled.size());
    for (const auto& [text, label] : labeled) {
        std::vector<std::size_t> indices;
        for (const auto& word : word_unigrams(text)) {
            auto [it, inserted] = model.vocabulary.emplace(word, model.vocabulary.size());
            indices.push_back(it->second);
        }
        rows.push_back(std::move(indices));
    }
    model.weights.assign(model.vocabulary.size(), 0.0);

    const double n = static_cast<double>(labeled.size());
    std::size_t max_features = 1;
    for (const auto& row : rows) max_features = std::max(max_features, row.size() + 1);

    auto loss_of = [&](const std::vector<double>& w, double b) {
        double loss = 0.0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            double z = b;
            for (std::size_t j : rows[i]) z += w[j];
            double y = labeled[i].second;
            // numerically stable log(1 + exp(.))
            double m = std::max(z, 0.0);
            loss += m - y * z + std::log(std::exp(-m) + std::exp(z - m));
        }
        return loss / n;
    };

    // Safe step for the smoothness bound of the logistic loss; halved further
    // whenever a step would raise the loss.
    double lr = 4.0 / static_cast<double>(max_features);
    double loss = loss_of(model.weights, model.bias);
    model.loss_history.push_back(loss);
    std::vector<double> grad(model.weights.size());
    for (int epoch = 0; epoch < epochs; ++epoch) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_bias = 0.0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            double z = model.bias;
            for (std::size_t j : rows[i]) z += model.weights[j];
            double err = sigmoid(z) - labeled[i].second;
            for (std::size_t j : rows[i]) grad[j] += err;
            grad_bias += err;
        }
        for (double& g : grad) g /= n;
        grad_bias /= n;

        for (int tries = 0; tries < 60; ++tries) {
            std::vector<double> next = model.weights;
            for (std::size_t j = 0; j < next.size(); ++j) next[j] -= lr * grad[j];
            double next_bias = model.bias - lr * grad_bias;
            double next_loss = loss_of(next, next_bias);
            if (next_loss <= loss) {
                model.weights = std::move(next);
                model.bias = next_bias;
                loss = next_loss;
                break;
            }
            lr *= 0.5;
        }
        model.loss_history.push_back(loss);
    }
    (void)seed;  // training is deterministic; the seed is part of the call contract
    return model;
}

std::vector<CommentRecord> score_comments(std::vector<CommentRecord> comments,
                                          const LexiconScorer& scorer) {
    for (auto& c : comments) c.relevance = lexicon_classify(c.text, scorer.lexicon);
    return comments;
}

std::vector<CommentRecord> score_comments(std::vector<CommentRecord> comments,
                                          const ModelScorer& scorer) {
    for (auto& c : comments) c.relevance = scorer.model.classify(c.text);
    return comments;
}

std::vector<CommentRecord> score_comments(std::vector<CommentRecord> comments,
                                          const ImportedScores& scores) {
    for (auto& c : comments) {
        auto it = scores.by_comment_id.find(c.comment_id);
        if (it == scores.by_comment_id.end())
            fail("MissingScore", "no imported relevance for comment " + c.comment_id);
        if (it->second != 0 && it->second != 1)
            fail("MissingScore", "imported relevance for " + c.comment_id + " is not 0/1");
        c.relevance = it->second;
    }
    return comments;
}

std::vector<CommentRecord> comments_from_csv(const std::vector<std::vector<std::string>>& rows) {
    if (rows.empty() || rows.front() != std::vector<std::string>{"comment_id", "notebook_id", "author_id",
                                                                 "parent_comment_id", "text", "upvotes"})
        fail("CsvFormat", "unexpected comments CSV header");
    std::vector<CommentRecord> comments;
    comments.reserve(rows.size() - 1);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != 6) fail("CsvFormat", "comments row " + std::to_string(i) + " has wrong arity");
        CommentRecord c;
        c.comment_id = row[0];
        c.notebook_id = row[1];
        c.author_id = row[2];
        if (!row[3].empty()) c.parent_comment_id = row[3];
        c.text = row[4];
        c.upvotes = std::stol(row[5]);
        if (c.upvotes < 0) fail("CsvFormat", "negative upvotes for comment " + c.comment_id);
        comments.push_back(std::move(c));
    }
    return comments;
}

std::map<std::string, int> imported_scores_from_csv(const std::vector<std::vector<std::string>>& rows) {
    if (rows.empty() || rows.front() != std::vector<std::string>{"comment_id", "relevance"})
        fail("CsvFormat", "unexpected imported-scores CSV header");
    std::map<std::string, int> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != 2) fail("CsvFormat", "scores row " + std::to_string(i) + " has wrong arity");
        out[rows[i][0]] = std::stoi(rows[i][1]);
    }
    return out;
}

void save_text_model(const LinearTextModel& model, const std::string& path) {
    nlohmann::json doc;
    doc["vocabulary"] = model.vocabulary;
    doc["weights"] = model.weights;
    doc["bias"] = model.bias;
    doc["threshold"] = model.threshold;
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("IoError", "cannot write " + path);
    out << doc.dump(1) << '\n';
}

LinearTextModel load_text_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("IoError", "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    nlohmann::json doc = nlohmann::json::parse(buf.str(), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) fail("TextModelFormat", "bad text model: " + path);
    LinearTextModel model;
    try {
        model.vocabulary = doc.at("vocabulary").get<std::map<std::string, std::size_t>>();
        model.weights = doc.at("weights").get<std::vector<double>>();
        model.bias = doc.at("bias").get<double>();
        model.threshold = doc.at("threshold").get<double>();
    } catch (const nlohmann::json::exception& e) {
        fail("TextModelFormat", std::string("bad text model: ") + e.what());
    }
    if (model.weights.size() != model.vocabulary.size())
        fail("TextModelFormat", "weight vector does not match vocabulary");
    return model;
}

Lexicon load_lexicon(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("IoError", "cannot open " + path);
    Lexicon lexicon;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (!line.empty()) lexicon.push_back(line);
    }
    if (lexicon.empty()) fail("EmptyLexicon", "no phrases in " + path);
    return lexicon;
}

}  // namespace nblens
