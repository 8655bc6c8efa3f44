#include <doctest.h>

#include <algorithm>

#include "nblens/comments.hpp"
#include "nblens/csv.hpp"
#include "nblens/rng.hpp"
#include "support.hpp"

using namespace nblens;
using testsupport::error_code_of;

namespace {

CommentRecord comment(std::string id, std::string nb, std::string author, std::string text,
                      long upvotes = 0, std::optional<std::string> parent = std::nullopt) {
    CommentRecord c;
    c.comment_id = std::move(id);
    c.notebook_id = std::move(nb);
    c.author_id = std::move(author);
    c.text = std::move(text);
    c.upvotes = upvotes;
    c.parent_comment_id = std::move(parent);
    return c;
}

std::map<std::string, NotebookMetadata> one_notebook_meta(const std::string& nb_id,
                                                          const std::string& author) {
    NotebookMetadata m;
    m.notebook_id = nb_id;
    m.author_id = author;
    m.total_views = 1000;
    std::map<std::string, NotebookMetadata> meta;
    meta[nb_id] = m;
    return meta;
}

// Expert-labeled sample: comment text and its binary relevance (positive
// understandability mentions = 1, everything else = 0).
const std::vector<std::pair<std::string, int>>& labeled_sample() {
    static const std::vector<std::pair<std::string, int>> rows = {
        {"Great score!", 0},
        {"Great work! Could you please checkout my work too. Thanks! https://www.kaggle.com/aditya", 0},
        {"One of the best notebook resources in Kaggle, appreciated. Upvoted.", 1},
        {"thanks~", 0},
        {"Excellent Notebook with interactive visualizations. Sometimes algorithms and ML are so funny. "
         "That's sarcasm. I'm 55 in Notebook and Dataset 254. Both are great.", 1},
        {"You changed my view toward data cleaning and also analyzing data. Cool Notebook!", 1},
        {"Thanks kaggle! I wanted to start working with kaggle for months. This was a pretty nice way to "
         "start and finally I did it :))", 0},
        {"I don't understand the point of sharing a blend kernel, if you're not going to explain what "
         "you're blending. All I see is that you have a black box which produces 1.448 LB score", 0},
        {"Good job @artaxae! This notebook is very informative. You have explained all the data "
         "processes in a detailed way.", 1},
        {"thank you", 0},
        {"clean notebook! Thanks for sharing", 1},
        {"Nice example to get started in the competition", 1},
        {"Well explained Ashok", 1},
        {"Nice work! I have a similar work based on emotion recognition from tweets. I would like to "
         "have your feedback on this notebook.", 0},
        {"Nice Work. Notebook was very simple to follow !!!", 1},
        {"Thank you for sharing! I learned so many things through this kernel.", 1},
        {"thank you for your work", 0},
        {"Thanks for the sharing, learn a lot:)", 1},
        {"Thanks for sharing. I am a beginner in Python. These step by step explanations are very much "
         "useful for me.", 1},
        {"wow, congrat!", 0},
        {"It was my first time using Random Forest! So much to learn", 1},
        {"Really helpful notebook to learn ML, thanks for sharing your knowledge.", 1},
    };
    return rows;
}

}  // namespace

TEST_CASE("clean_comments removes replies and author comments") {
    auto meta = one_notebook_meta("nb", "owner");
    std::vector<CommentRecord> comments = {
        comment("c1", "nb", "user1", "nice notebook"),
        comment("c2", "nb", "user2", "reply here", 0, std::string("c1")),
        comment("c3", "nb", "owner", "thanks all"),
        comment("c4", "nb", "user3", "well explained"),
    };
    auto kept = clean_comments(comments, meta);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].comment_id == "c1");
    CHECK(kept[1].comment_id == "c4");
    // retained records are untouched
    CHECK(kept[0] == comments[0]);
}

TEST_CASE("clean_comments removes non-English comments") {
    auto meta = one_notebook_meta("nb", "owner");
    std::vector<CommentRecord> comments = {
        comment("en", "nb", "u1", "clear and helpful walkthrough"),
        comment("ru", "nb", "u2", "\xD0\xBE\xD1\x87\xD0\xB5\xD0\xBD\xD1\x8C \xD1\x85\xD0\xBE\xD1\x80\xD0\xBE\xD1\x88\xD0\xBE"),
        comment("mixed", "nb", "u3", "ok \xE4\xBD\xA0\xE5\xA5\xBD\xE4\xB8\x96\xE7\x95\x8C\xE5\x86\x8D\xE8\xA7\x81"),
    };
    auto kept = clean_comments(comments, meta);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].comment_id == "en");

    CHECK(english_letter_ratio("abc") == doctest::Approx(1.0));
    CHECK(english_letter_ratio("123 !!!") == doctest::Approx(1.0));  // nothing alphabetic
    CHECK(english_letter_ratio("ab\xC3\xA9\xC3\xA9") == doctest::Approx(0.5));
}

TEST_CASE("clean_comments cuts the long tail at the length percentile") {
    auto meta = one_notebook_meta("nb", "owner");
    std::vector<CommentRecord> comments;
    Rng rng(42);
    for (int i = 0; i < 199; ++i) {
        std::string text(20 + rng.below(150), 'a');
        comments.push_back(comment("c" + std::to_string(i), "nb", "u", text));
    }
    comments.push_back(comment("long", "nb", "u", std::string(9000, 'a')));

    auto kept = clean_comments(comments, meta);
    CHECK(std::none_of(kept.begin(), kept.end(),
                       [](const CommentRecord& c) { return c.comment_id == "long"; }));
    // only the tail above the 99th percentile goes
    CHECK(kept.size() >= 197);
}

TEST_CASE("clean_comments errors on unknown notebooks") {
    auto meta = one_notebook_meta("nb", "owner");
    std::vector<CommentRecord> comments = {comment("c", "other", "u", "text")};
    CHECK(error_code_of([&] { clean_comments(comments, meta); }) == "UnknownNotebook");
}

TEST_CASE("cleaning is idempotent") {
    auto meta = one_notebook_meta("nb", "owner");
    Rng rng(77);

    // full config over corpora small enough that the rank cut is exact
    for (int round = 0; round < 10; ++round) {
        std::vector<CommentRecord> comments;
        std::size_t n = 20 + rng.below(80);
        for (std::size_t i = 0; i < n; ++i) {
            std::string text(1 + rng.below(400), 'x');
            auto parent = rng.below(4) == 0 ? std::optional<std::string>("p") : std::nullopt;
            std::string author = rng.below(4) == 0 ? "owner" : "user";
            comments.push_back(comment("c" + std::to_string(i), "nb", author, text, 0, parent));
        }
        auto once = clean_comments(comments, meta);
        auto twice = clean_comments(once, meta);
        CHECK(once == twice);
    }

    // any size once the length rule is disabled (percentile 100 keeps the max)
    CleaningConfig no_cut;
    no_cut.length_percentile_cut = 100.0;
    std::vector<CommentRecord> big;
    for (int i = 0; i < 500; ++i)
        big.push_back(comment("c" + std::to_string(i), "nb", i % 3 ? "user" : "owner",
                              std::string(1 + rng.below(2000), 'y')));
    auto once = clean_comments(big, meta, no_cut);
    CHECK(clean_comments(once, meta, no_cut) == once);
}

TEST_CASE("lexicon_classify reproduces the expert-labeled sample") {
    CHECK(lexicon_classify("well-explained notebook", default_lexicon()) == 1);
    CHECK(lexicon_classify("Great score!", default_lexicon()) == 0);
    CHECK(lexicon_classify("One of the best notebook resources in Kaggle, appreciated. Upvoted.",
                           default_lexicon()) == 1);
    CHECK(lexicon_classify("nicely organized file and good EDA", default_lexicon()) == 1);
    CHECK(lexicon_classify("very well presented and nice kernel", default_lexicon()) == 1);

    for (const auto& [text, label] : labeled_sample()) {
        INFO("comment: " << text);
        CHECK(lexicon_classify(text, default_lexicon()) == label);
    }
}

TEST_CASE("score_comments lexicon mode sets relevance everywhere") {
    std::vector<CommentRecord> comments = {
        comment("a", "nb", "u", "well explained work"),
        comment("b", "nb", "u", "great job"),
    };
    auto scored = score_comments(comments, LexiconScorer{});
    REQUIRE(scored.size() == 2);
    CHECK(scored[0].relevance == 1);
    CHECK(scored[1].relevance == 0);
}

TEST_CASE("score_comments import mode") {
    std::vector<CommentRecord> comments = {
        comment("c1", "nb", "u", "x"),
        comment("c2", "nb", "u", "y"),
    };
    ImportedScores scores;
    scores.by_comment_id = {{"c1", 1}, {"c2", 0}};
    auto scored = score_comments(comments, scores);
    CHECK(scored[0].relevance == 1);
    CHECK(scored[1].relevance == 0);

    ImportedScores missing;
    missing.by_comment_id = {{"c1", 1}};
    CHECK(error_code_of([&] { score_comments(comments, missing); }) == "MissingScore");
}

TEST_CASE("train_linear_classifier separates a keyword dataset") {
    Rng rng(9);
    std::vector<std::pair<std::string, int>> labeled;
    std::vector<std::string> filler = {"great", "score", "thanks", "nice", "work", "wow"};
    for (int i = 0; i < 100; ++i) {
        std::string text;
        for (int w = 0; w < 5; ++w) text += filler[rng.below(filler.size())] + " ";
        bool positive = i % 2 == 0;
        if (positive) text += "explained";
        labeled.emplace_back(text, positive ? 1 : 0);
    }
    auto train = std::vector<std::pair<std::string, int>>(labeled.begin(), labeled.end() - 20);
    auto held_out = std::vector<std::pair<std::string, int>>(labeled.end() - 20, labeled.end());

    LinearTextModel model = train_linear_classifier(train, 1);
    int correct = 0;
    for (const auto& [text, label] : held_out)
        if (model.classify(text) == label) ++correct;
    CHECK(correct == 20);
}

TEST_CASE("train_linear_classifier input validation") {
    std::vector<std::pair<std::string, int>> all_ones;
    for (int i = 0; i < 30; ++i) all_ones.emplace_back("text " + std::to_string(i), 1);
    CHECK(error_code_of([&] { train_linear_classifier(all_ones, 1); }) == "SingleClassData");

    std::vector<std::pair<std::string, int>> few = {{"a", 0}, {"b", 1}};
    CHECK(error_code_of([&] { train_linear_classifier(few, 1); }) == "TooFewExamples");
}

TEST_CASE("train_linear_classifier is deterministic and loss never increases") {
    std::vector<std::pair<std::string, int>> labeled;
    Rng rng(11);
    std::vector<std::string> words = {"alpha", "beta", "gamma", "delta", "clear", "messy"};
    for (int i = 0; i < 60; ++i) {
        std::string text;
        for (int w = 0; w < 6; ++w) text += words[rng.below(words.size())] + " ";
        labeled.emplace_back(text, static_cast<int>(rng.below(2)));
    }
    LinearTextModel a = train_linear_classifier(labeled, 123);
    LinearTextModel b = train_linear_classifier(labeled, 123);
    CHECK(a.weights == b.weights);  // bitwise
    CHECK(a.bias == b.bias);

    REQUIRE(a.loss_history.size() > 1);
    for (std::size_t i = 1; i < a.loss_history.size(); ++i)
        CHECK(a.loss_history[i] <= a.loss_history[i - 1] + 1e-15);
}

TEST_CASE("comments csv round trip") {
    std::vector<std::vector<std::string>> rows = {
        {"comment_id", "notebook_id", "author_id", "parent_comment_id", "text", "upvotes"},
        {"c1", "nb1", "u1", "", "has, commas \"and\" quotes\nand a newline", "3"},
        {"c2", "nb1", "u2", "c1", "reply", "0"},
    };
    std::string text;
    for (const auto& row : rows) text += csv::join_row(row) + "\n";
    auto parsed = comments_from_csv(csv::parse(text));
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0].text == "has, commas \"and\" quotes\nand a newline");
    CHECK_FALSE(parsed[0].parent_comment_id.has_value());
    CHECK(parsed[1].parent_comment_id == std::string("c1"));
}
