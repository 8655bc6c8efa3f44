#include "nblens/cli.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <set>
#include <sstream>

#include "nblens/comments.hpp"
#include "nblens/config.hpp"
#include "nblens/csv.hpp"
#include "nblens/dataset.hpp"
#include "nblens/errors.hpp"
#include "nblens/eval.hpp"
#include "nblens/explain.hpp"
#include "nblens/model_io.hpp"
#include "nblens/nb_metrics.hpp"
#include "nblens/scoring.hpp"
#include "nblens/service.hpp"
#include "nblens/tree.hpp"

namespace nblens {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("IoError", "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void report_error(const std::string& code, const std::string& message) {
    json doc;
    doc["error"] = code;
    doc["message"] = message;
    std::cerr << doc.dump() << '\n';
}

void report_notebook_failure(const std::string& id, const Error& e) {
    json doc;
    doc["notebook_id"] = id;
    doc["error"] = e.code();
    doc["message"] = e.message();
    std::cerr << doc.dump() << '\n';
}

// ---- metrics CSV ---------------------------------------------------------

struct MetricsTable {
    std::vector<std::string> ids;
    std::vector<std::string> feature_names;
    std::vector<double> x;  // row major

    std::size_t rows() const { return ids.size(); }
    std::span<const double> row(std::size_t i) const {
        return {x.data() + i * feature_names.size(), feature_names.size()};
    }
};

MetricsTable load_metrics_csv(const std::string& path) {
    auto rows = csv::read_file(path);
    if (rows.empty() || rows.front().empty() || rows.front()[0] != "notebook_id")
        fail("CsvFormat", "metrics CSV must start with a notebook_id header: " + path);
    MetricsTable table;
    table.feature_names.assign(rows.front().begin() + 1, rows.front().end());
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != rows.front().size())
            fail("CsvFormat", "metrics row " + std::to_string(i) + " has wrong arity");
        table.ids.push_back(row[0]);
        for (std::size_t c = 1; c < row.size(); ++c) table.x.push_back(std::stod(row[c]));
    }
    return table;
}

std::map<std::string, std::string> load_labels_csv(const std::string& path) {
    auto rows = csv::read_file(path);
    if (rows.empty() || rows.front() != std::vector<std::string>{"notebook_id", "label"})
        fail("CsvFormat", "unexpected labels CSV header: " + path);
    std::map<std::string, std::string> labels;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != 2) fail("CsvFormat", "labels row " + std::to_string(i) + " has wrong arity");
        labels[rows[i][0]] = rows[i][1];
    }
    return labels;
}

// Known label sets map to fixed class indices (GCU is always the positive
// class 1); anything else falls back to sorted order.
std::vector<std::string> canonical_class_names(const std::map<std::string, std::string>& labels) {
    std::vector<std::string> distinct;
    for (const auto& [id, label] : labels)
        if (std::find(distinct.begin(), distinct.end(), label) == distinct.end())
            distinct.push_back(label);
    std::sort(distinct.begin(), distinct.end());

    auto equals = [&](const std::vector<std::string>& set) {
        return distinct.size() == set.size() &&
               std::is_permutation(distinct.begin(), distinct.end(), set.begin());
    };
    if (equals({"NCU", "GCU"})) return {"NCU", "GCU"};
    if (equals({"L0", "L1", "L2"})) return {"L0", "L1", "L2"};
    if (equals({"Q1", "Q2", "Q3", "Q4"})) return {"Q1", "Q2", "Q3", "Q4"};
    return distinct;
}

// Inner join of metrics and labels by notebook id, optionally dropping the
// PT column. Returns the dataset plus the class-name order used for y.
std::pair<Dataset, std::vector<std::string>> join_dataset(const MetricsTable& metrics,
                                                          const std::map<std::string, std::string>& labels,
                                                          bool drop_pt) {
    std::vector<std::string> class_names = canonical_class_names(labels);
    auto class_of = [&](const std::string& name) {
        auto it = std::find(class_names.begin(), class_names.end(), name);
        return static_cast<int>(it - class_names.begin());
    };

    Dataset d;
    std::vector<std::size_t> kept_columns;
    for (std::size_t c = 0; c < metrics.feature_names.size(); ++c) {
        if (drop_pt && metrics.feature_names[c] == "PT") continue;
        kept_columns.push_back(c);
        d.feature_names.push_back(metrics.feature_names[c]);
    }
    for (std::size_t i = 0; i < metrics.rows(); ++i) {
        auto it = labels.find(metrics.ids[i]);
        if (it == labels.end()) continue;
        auto row = metrics.row(i);
        for (std::size_t c : kept_columns) d.x.push_back(row[c]);
        d.y.push_back(class_of(it->second));
        d.ids.push_back(metrics.ids[i]);
    }
    if (d.y.empty()) fail("EmptyDataset", "no notebook ids shared between metrics and labels");
    d.validate();
    return {std::move(d), std::move(class_names)};
}

// ---- extract --------------------------------------------------------------

std::vector<fs::path> notebook_files(const std::string& input) {
    fs::path root(input);
    if (!fs::exists(root)) fail("IoError", "no such file or directory: " + input);
    std::vector<fs::path> files;
    if (fs::is_directory(root)) {
        for (const auto& entry : fs::recursive_directory_iterator(root))
            if (entry.is_regular_file() && entry.path().extension() == ".ipynb")
                files.push_back(entry.path());
    } else {
        files.push_back(root);
    }
    std::sort(files.begin(), files.end());
    return files;
}

int cmd_extract(const std::string& input, const std::string& out_csv,
                const std::string& popularity_path, const std::string& meta_csv,
                const PipelineConfig& cfg) {
    auto files = notebook_files(input);

    std::map<std::string, NotebookMetadata> meta;
    if (!meta_csv.empty()) meta = metadata_from_csv(csv::read_file(meta_csv));

    // pass 1: parse everything and build (or reuse) the popularity table
    std::vector<Notebook> notebooks;
    std::set<std::string> seen_ids;
    for (const auto& path : files) {
        std::string id = path.stem().string();
        if (!seen_ids.insert(id).second) {
            report_notebook_failure(id, Error("DuplicateNotebookId",
                                              "second file with stem '" + id + "' skipped: " +
                                                  path.string()));
            continue;
        }
        try {
            notebooks.push_back(parse_notebook(read_file(path.string()), id));
        } catch (const Error& e) {
            report_notebook_failure(id, e);
        }
    }
    if (notebooks.empty()) fail("EmptyCorpus", "no parseable notebooks under " + input);

    PopularityTable table;
    if (!popularity_path.empty() && fs::exists(popularity_path)) {
        table = load_popularity(popularity_path);
    } else {
        table = build_api_popularity(notebooks);
        if (!popularity_path.empty()) save_popularity(table, popularity_path);
    }

    // pass 2: metric vectors, sorted by notebook id
    std::sort(notebooks.begin(), notebooks.end(),
              [](const Notebook& a, const Notebook& b) { return a.notebook_id < b.notebook_id; });
    std::vector<std::vector<std::string>> rows;
    rows.push_back(metric_csv_header());
    for (const Notebook& nb : notebooks) {
        NotebookMetadata m;
        auto it = meta.find(nb.notebook_id);
        if (it != meta.end()) m = it->second;
        m.notebook_id = nb.notebook_id;
        try {
            rows.push_back(metric_csv_row(assemble_metric_vector(nb, m, table, cfg.visualization_mimes)));
        } catch (const Error& e) {
            report_notebook_failure(nb.notebook_id, e);
        }
    }
    if (rows.size() == 1) fail("EmptyCorpus", "every notebook failed metric extraction");
    csv::write_file(out_csv, rows);
    return 0;
}

// ---- score ----------------------------------------------------------------

int cmd_score(const std::string& comments_csv, const std::string& meta_csv,
              const std::string& scorer, const std::string& out_csv,
              const std::string& text_model_path, const std::string& import_csv,
              const std::string& lexicon_path, const PipelineConfig& cfg) {
    auto comments = comments_from_csv(csv::read_file(comments_csv));
    auto meta = metadata_from_csv(csv::read_file(meta_csv));

    auto cleaned = clean_comments(comments, meta, cfg.cleaning);

    std::vector<CommentRecord> scored;
    if (scorer == "lexicon") {
        LexiconScorer lex;
        if (!lexicon_path.empty()) lex.lexicon = load_lexicon(lexicon_path);
        scored = score_comments(std::move(cleaned), lex);
    } else if (scorer == "model") {
        if (text_model_path.empty()) fail("ConfigError", "--scorer model needs --text-model");
        scored = score_comments(std::move(cleaned), ModelScorer{load_text_model(text_model_path)});
    } else if (scorer == "import") {
        if (import_csv.empty()) fail("ConfigError", "--scorer import needs --import-scores");
        scored = score_comments(std::move(cleaned),
                                ImportedScores{imported_scores_from_csv(csv::read_file(import_csv))});
    } else {
        fail("ConfigError", "unknown scorer: " + scorer);
    }

    std::map<std::string, std::vector<CommentRecord>> by_notebook;
    for (auto& c : scored) by_notebook[c.notebook_id].push_back(std::move(c));

    std::map<std::string, double> uocu_scores, upvote_scores;
    long below_floor = 0;
    for (const auto& [id, m] : meta) {
        if (m.total_views < cfg.scoring.min_views) {
            ++below_floor;
            continue;
        }
        static const std::vector<CommentRecord> none;
        const auto it = by_notebook.find(id);
        uocu_scores[id] = uocu(m, it == by_notebook.end() ? none : it->second, cfg.scoring);
        upvote_scores[id] = upvote_score(m);
    }
    if (below_floor > 0)
        std::cerr << "{\"note\":\"view_floor\",\"dropped\":" << below_floor << "}\n";
    auto hybrid = hybrid_score(uocu_scores, upvote_scores);

    std::vector<std::vector<std::string>> rows;
    rows.push_back({"notebook_id", "uocu", "upvote", "hybrid"});
    for (const auto& [id, u] : uocu_scores)
        rows.push_back({id, csv::format_real(u), csv::format_real(upvote_scores.at(id)),
                        csv::format_real(hybrid.at(id))});
    csv::write_file(out_csv, rows);
    return 0;
}

// ---- label ----------------------------------------------------------------

int cmd_label(const std::string& scores_csv, const std::string& criterion,
              const std::string& mode_name, const std::string& out_csv) {
    auto rows = csv::read_file(scores_csv);
    if (rows.empty() || rows.front() != std::vector<std::string>{"notebook_id", "uocu", "upvote", "hybrid"})
        fail("CsvFormat", "unexpected scores CSV header: " + scores_csv);
    std::size_t column;
    if (criterion == "uocu") column = 1;
    else if (criterion == "upvote") column = 2;
    else if (criterion == "hybrid") column = 3;
    else fail("ConfigError", "unknown criterion: " + criterion);

    LabelMode mode;
    if (mode_name == "binary") mode = LabelMode::Binary;
    else if (mode_name == "ternary") mode = LabelMode::Ternary;
    else if (mode_name == "quaternary") mode = LabelMode::Quaternary;
    else fail("ConfigError", "unknown mode: " + mode_name);

    std::map<std::string, double> scores;
    for (std::size_t i = 1; i < rows.size(); ++i) scores[rows[i][0]] = std::stod(rows[i][column]);

    auto labeled = discretize(scores, mode);
    std::sort(labeled.begin(), labeled.end(),
              [](const LabeledExample& a, const LabeledExample& b) {
                  return a.notebook_id < b.notebook_id;
              });
    std::vector<std::vector<std::string>> out;
    out.push_back({"notebook_id", "label"});
    for (const auto& ex : labeled) out.push_back({ex.notebook_id, ex.label});
    csv::write_file(out_csv, out);
    return 0;
}

// ---- train / evaluate / explain / predict ----------------------------------

int cmd_train(const std::string& metrics_csv, const std::string& labels_csv,
              const std::string& kind, const std::string& out_path, std::uint64_t seed,
              bool drop_pt, const PipelineConfig& cfg) {
    auto metrics = load_metrics_csv(metrics_csv);
    auto labels = load_labels_csv(labels_csv);
    auto [dataset, class_names] = join_dataset(metrics, labels, drop_pt);

    ModelBundle bundle;
    bundle.feature_names = dataset.feature_names;
    bundle.class_names = class_names;
    bundle.kind = kind;
    if (kind == "rf") {
        bundle.forest = train_forest(dataset, cfg.forest, seed);
    } else if (kind == "tree") {
        TreeConfig tree_cfg{cfg.forest.max_depth, cfg.forest.min_samples_leaf, 0};
        bundle.forest.trees.push_back(train_tree(dataset, tree_cfg, seed));
        bundle.forest.n_trees = 1;
        bundle.forest.features_per_split = 0;
        bundle.forest.seed = seed;
    } else {
        fail("ConfigError", "unknown model kind: " + kind);
    }
    save_model(bundle, out_path);
    return 0;
}

// Predictions plus positive-class scores for every joined row.
struct Predictions {
    std::vector<int> predicted;
    std::vector<double> scores;
    std::vector<int> truth;
    std::vector<std::string> ids;
};

Predictions predict_table(const ModelBundle& bundle, const MetricsTable& metrics,
                          const std::map<std::string, std::string>& labels) {
    auto columns = feature_column_map(bundle.feature_names, metrics.feature_names);
    auto class_names = canonical_class_names(labels);
    Predictions p;
    for (std::size_t i = 0; i < metrics.rows(); ++i) {
        auto it = labels.find(metrics.ids[i]);
        if (it == labels.end()) continue;
        auto truth_it = std::find(class_names.begin(), class_names.end(), it->second);
        std::vector<double> x;
        x.reserve(columns.size());
        auto row = metrics.row(i);
        for (std::size_t c : columns) x.push_back(row[c]);
        p.predicted.push_back(bundle.forest.predict(x));
        p.scores.push_back(bundle.forest.proba(x).back());  // positive class slot
        p.truth.push_back(static_cast<int>(truth_it - class_names.begin()));
        p.ids.push_back(metrics.ids[i]);
    }
    if (p.ids.empty()) fail("EmptyDataset", "no notebook ids shared between metrics and labels");
    return p;
}

int cmd_evaluate(const std::string& model_path, const std::string& metrics_csv,
                 const std::string& labels_csv, const std::string& out_json) {
    ModelBundle bundle = load_model(model_path);
    auto metrics = load_metrics_csv(metrics_csv);
    auto labels = load_labels_csv(labels_csv);
    auto p = predict_table(bundle, metrics, labels);

    EvalReport report = evaluate(p.scores, p.predicted, p.truth);
    json doc;
    doc["accuracy"] = report.accuracy;
    doc["precision"] = report.precision;
    doc["recall"] = report.recall;
    doc["f1"] = report.f1;
    doc["auc_roc"] = report.auc_roc;
    doc["classes"] = json::array();
    for (int c : report.classes) doc["classes"].push_back(bundle.class_names[c]);
    doc["confusion"] = report.confusion;
    doc["flags"] = report.flags;
    doc["n"] = p.ids.size();

    std::ofstream out(out_json, std::ios::binary);
    if (!out) fail("IoError", "cannot write " + out_json);
    out << doc.dump(1) << '\n';
    return 0;
}

int cmd_explain(const std::string& model_path, const std::string& metrics_csv,
                const std::string& method, const std::string& out_csv,
                const std::string& labels_csv, std::uint64_t seed, int repeats) {
    ModelBundle bundle = load_model(model_path);
    auto metrics = load_metrics_csv(metrics_csv);
    std::vector<std::vector<std::string>> rows;

    if (method == "shap") {
        auto columns = feature_column_map(bundle.feature_names, metrics.feature_names);
        std::vector<std::string> header = {"notebook_id", "base"};
        header.insert(header.end(), bundle.feature_names.begin(), bundle.feature_names.end());
        rows.push_back(header);
        for (std::size_t i = 0; i < metrics.rows(); ++i) {
            std::vector<double> x;
            auto row = metrics.row(i);
            for (std::size_t c : columns) x.push_back(row[c]);
            ShapValues shap = tree_shap(bundle.forest, x);
            std::vector<std::string> out_row = {metrics.ids[i], csv::format_real(shap.base)};
            for (double phi : shap.phi) out_row.push_back(csv::format_real(phi));
            rows.push_back(std::move(out_row));
        }
    } else if (method == "permutation") {
        if (labels_csv.empty()) fail("ConfigError", "--method permutation needs --labels");
        auto labels = load_labels_csv(labels_csv);
        auto [dataset, class_names] = join_dataset(metrics, labels, false);
        // align the dataset columns with the model's features
        auto columns = feature_column_map(bundle.feature_names, dataset.feature_names);
        Dataset aligned;
        aligned.feature_names = bundle.feature_names;
        aligned.y = dataset.y;
        aligned.ids = dataset.ids;
        for (std::size_t i = 0; i < dataset.rows(); ++i) {
            auto row = dataset.row(i);
            for (std::size_t c : columns) aligned.x.push_back(row[c]);
        }
        auto importances = permutation_importance(bundle.forest, aligned, seed, repeats);
        rows.push_back({"feature", "importance"});
        for (std::size_t f = 0; f < importances.size(); ++f)
            rows.push_back({bundle.feature_names[f], csv::format_real(importances[f])});
    } else if (method == "mdi") {
        auto importances = mean_decrease_impurity(bundle.forest);
        rows.push_back({"feature", "importance"});
        for (std::size_t f = 0; f < importances.size(); ++f)
            rows.push_back({bundle.feature_names[f], csv::format_real(importances[f])});
    } else {
        fail("ConfigError", "unknown method: " + method);
    }
    csv::write_file(out_csv, rows);
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& notebook_path,
                const std::string& popularity_path, int pt, const PipelineConfig& cfg) {
    MetricsService service(load_model(model_path), load_popularity(popularity_path), cfg);
    std::cout << service.predict_json(read_file(notebook_path), pt) << '\n';
    return 0;
}

int cmd_serve(const std::string& model_path, const std::string& popularity_path, int port,
              std::size_t size_limit, const PipelineConfig& cfg) {
    ServiceConfig service_cfg;
    if (size_limit > 0) service_cfg.max_body_bytes = size_limit;
    MetricsService service(load_model(model_path), load_popularity(popularity_path), cfg,
                           service_cfg);
    httplib::Server server;
    service.install_routes(server);
    std::cerr << "{\"note\":\"listening\",\"port\":" << port << "}\n";
    if (!server.listen("0.0.0.0", port)) fail("IoError", "cannot bind port " + std::to_string(port));
    return 0;
}

int cmd_train_text(const std::string& labeled_csv, const std::string& out_path,
                   std::uint64_t seed) {
    auto rows = csv::read_file(labeled_csv);
    if (rows.empty() || rows.front() != std::vector<std::string>{"text", "label"})
        fail("CsvFormat", "unexpected labeled-text CSV header: " + labeled_csv);
    std::vector<std::pair<std::string, int>> labeled;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != 2) fail("CsvFormat", "labeled row " + std::to_string(i) + " has wrong arity");
        labeled.emplace_back(rows[i][0], std::stoi(rows[i][1]));
    }
    save_text_model(train_linear_classifier(labeled, seed), out_path);
    return 0;
}

}  // namespace

int cli_run(int argc, char** argv) {
    CLI::App app{"notebook metric extraction, understandability scoring and prediction"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "pipeline config JSON")->configurable(false);

    // extract
    auto* extract = app.add_subcommand("extract", "compute the 34-metric CSV for a notebook file or directory");
    std::string ex_input, ex_out, ex_popularity, ex_meta;
    extract->add_option("input", ex_input, "notebook file or directory")->required();
    extract->add_option("--out", ex_out, "output metrics CSV")->required();
    extract->add_option("--popularity", ex_popularity, "popularity table JSON to reuse or create");
    extract->add_option("--meta", ex_meta, "metadata CSV supplying performance tiers");

    // score
    auto* score = app.add_subcommand("score", "compute per-notebook uocu/upvote/hybrid scores");
    std::string sc_comments, sc_meta, sc_scorer, sc_out, sc_text_model, sc_import, sc_lexicon;
    score->add_option("--comments", sc_comments)->required();
    score->add_option("--meta", sc_meta)->required();
    score->add_option("--scorer", sc_scorer, "lexicon|model|import")->required();
    score->add_option("--out", sc_out)->required();
    score->add_option("--text-model", sc_text_model, "trained text model JSON (scorer=model)");
    score->add_option("--import-scores", sc_import, "comment_id,relevance CSV (scorer=import)");
    score->add_option("--lexicon", sc_lexicon, "phrase file overriding the built-in lexicon");

    // label
    auto* label = app.add_subcommand("label", "discretize scores into class labels");
    std::string lb_scores, lb_criterion = "hybrid", lb_mode = "binary", lb_out;
    label->add_option("--scores", lb_scores)->required();
    label->add_option("--criterion", lb_criterion, "uocu|upvote|hybrid");
    label->add_option("--mode", lb_mode, "binary|ternary|quaternary");
    label->add_option("--out", lb_out)->required();

    // train
    auto* train = app.add_subcommand("train", "train a classifier on metrics + labels");
    std::string tr_metrics, tr_labels, tr_model = "rf", tr_out;
    std::uint64_t tr_seed = 17;
    bool tr_drop_pt = false;
    train->add_option("--metrics", tr_metrics)->required();
    train->add_option("--labels", tr_labels)->required();
    train->add_option("--model", tr_model, "rf|tree");
    train->add_option("--out", tr_out)->required();
    train->add_option("--seed", tr_seed);
    train->add_flag("--drop-pt", tr_drop_pt, "train without the PT column");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "score a trained model against labeled metrics");
    std::string ev_model, ev_metrics, ev_labels, ev_out;
    evaluate->add_option("--model", ev_model)->required();
    evaluate->add_option("--metrics", ev_metrics)->required();
    evaluate->add_option("--labels", ev_labels)->required();
    evaluate->add_option("--out", ev_out)->required();

    // explain
    auto* explain = app.add_subcommand("explain", "emit feature attributions");
    std::string xp_model, xp_metrics, xp_method, xp_out, xp_labels;
    std::uint64_t xp_seed = 17;
    int xp_repeats = 5;
    explain->add_option("--model", xp_model)->required();
    explain->add_option("--metrics", xp_metrics)->required();
    explain->add_option("--method", xp_method, "shap|permutation|mdi")->required();
    explain->add_option("--out", xp_out)->required();
    explain->add_option("--labels", xp_labels, "labels CSV (required for permutation)");
    explain->add_option("--seed", xp_seed);
    explain->add_option("--repeats", xp_repeats);

    // predict
    auto* predict = app.add_subcommand("predict", "predict one notebook's understandability class");
    std::string pr_model, pr_notebook, pr_popularity;
    int pr_pt = 0;
    predict->add_option("--model", pr_model)->required();
    predict->add_option("--notebook", pr_notebook)->required();
    predict->add_option("--popularity", pr_popularity)->required();
    predict->add_option("--pt", pr_pt, "performance tier 0..4");

    // serve
    auto* serve = app.add_subcommand("serve", "HTTP prediction service");
    std::string sv_model, sv_popularity;
    int sv_port = 8080;
    std::size_t sv_limit = 0;
    serve->add_option("--model", sv_model)->required();
    serve->add_option("--popularity", sv_popularity)->required();
    serve->add_option("--port", sv_port)->required();
    serve->add_option("--size-limit", sv_limit, "max upload bytes (default 10 MiB)");

    // train-text
    auto* train_text = app.add_subcommand("train-text", "train the linear comment classifier");
    std::string tt_labeled, tt_out;
    std::uint64_t tt_seed = 17;
    train_text->add_option("--labeled", tt_labeled, "text,label CSV")->required();
    train_text->add_option("--out", tt_out)->required();
    train_text->add_option("--seed", tt_seed);

    // let --config appear after the subcommand name
    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        PipelineConfig cfg;
        if (!config_path.empty()) cfg = load_pipeline_config(config_path);

        if (*extract)
            return cmd_extract(ex_input, ex_out, ex_popularity, ex_meta, cfg);
        if (*score)
            return cmd_score(sc_comments, sc_meta, sc_scorer, sc_out, sc_text_model, sc_import,
                             sc_lexicon, cfg);
        if (*label) return cmd_label(lb_scores, lb_criterion, lb_mode, lb_out);
        if (*train)
            return cmd_train(tr_metrics, tr_labels, tr_model, tr_out, tr_seed, tr_drop_pt, cfg);
        if (*evaluate) return cmd_evaluate(ev_model, ev_metrics, ev_labels, ev_out);
        if (*explain)
            return cmd_explain(xp_model, xp_metrics, xp_method, xp_out, xp_labels, xp_seed,
                               xp_repeats);
        if (*predict) return cmd_predict(pr_model, pr_notebook, pr_popularity, pr_pt, cfg);
        if (*serve) return cmd_serve(sv_model, sv_popularity, sv_port, sv_limit, cfg);
        if (*train_text) return cmd_train_text(tt_labeled, tt_out, tt_seed);
    } catch (const Error& e) {
        report_error(e.code(), e.message());
        return 1;
    } catch (const std::exception& e) {
        report_error("InternalError", e.what());
        return 1;
    }
    return 0;
}

}  // namespace nblens
