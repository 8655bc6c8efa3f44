#include "nblens/config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "nblens/errors.hpp"

namespace nblens {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!known.count(it.key()))
            fail("ConfigError", "unknown key '" + it.key() + "' in " + where);
}

}  // namespace

PipelineConfig parse_pipeline_config(const std::string& text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) fail("ConfigError", "config is not a JSON object");

    PipelineConfig cfg;
    reject_unknown(doc, {"visualization_mime_types", "cleaning", "scoring", "model", "seed", "paths"},
                   "config root");

    if (doc.contains("visualization_mime_types")) {
        if (!doc["visualization_mime_types"].is_array())
            fail("ConfigError", "visualization_mime_types must be an array");
        cfg.visualization_mimes.clear();
        for (const auto& v : doc["visualization_mime_types"])
            cfg.visualization_mimes.insert(v.get<std::string>());
    }
    if (doc.contains("cleaning")) {
        const auto& c = doc["cleaning"];
        reject_unknown(c, {"english_letter_ratio_min", "length_percentile_cut"}, "cleaning");
        cfg.cleaning.english_letter_ratio_min =
            c.value("english_letter_ratio_min", cfg.cleaning.english_letter_ratio_min);
        cfg.cleaning.length_percentile_cut =
            c.value("length_percentile_cut", cfg.cleaning.length_percentile_cut);
        if (cfg.cleaning.english_letter_ratio_min < 0.0 || cfg.cleaning.english_letter_ratio_min > 1.0)
            fail("ConfigError", "english_letter_ratio_min must lie in [0, 1]");
        if (cfg.cleaning.length_percentile_cut <= 0.0 || cfg.cleaning.length_percentile_cut > 100.0)
            fail("ConfigError", "length_percentile_cut must lie in (0, 100]");
    }
    if (doc.contains("scoring")) {
        const auto& s = doc["scoring"];
        reject_unknown(s, {"alpha", "min_views"}, "scoring");
        cfg.scoring.alpha = s.value("alpha", cfg.scoring.alpha);
        cfg.scoring.min_views = s.value("min_views", cfg.scoring.min_views);
        if (cfg.scoring.alpha <= 0.0) fail("ConfigError", "alpha must be positive");
        if (cfg.scoring.min_views < 1) fail("ConfigError", "min_views must be >= 1");
    }
    if (doc.contains("model")) {
        const auto& m = doc["model"];
        reject_unknown(m, {"n_trees", "max_depth", "min_samples_leaf", "features_per_split"}, "model");
        cfg.forest.n_trees = m.value("n_trees", cfg.forest.n_trees);
        cfg.forest.max_depth = m.value("max_depth", cfg.forest.max_depth);
        cfg.forest.min_samples_leaf = m.value("min_samples_leaf", cfg.forest.min_samples_leaf);
        cfg.forest.features_per_split = m.value("features_per_split", cfg.forest.features_per_split);
        if (cfg.forest.n_trees < 1) fail("ConfigError", "n_trees must be >= 1");
        if (cfg.forest.min_samples_leaf < 1) fail("ConfigError", "min_samples_leaf must be >= 1");
    }
    if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("paths")) {
        if (!doc["paths"].is_object()) fail("ConfigError", "paths must be an object");
        for (auto it = doc["paths"].begin(); it != doc["paths"].end(); ++it)
            cfg.paths[it.key()] = it.value().get<std::string>();
    }
    return cfg;
}

PipelineConfig load_pipeline_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("IoError", "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_pipeline_config(buf.str());
    } catch (const nlohmann::json::exception& e) {
        fail("ConfigError", std::string("bad config: ") + e.what());
    }
}

std::string serialize_pipeline_config(const PipelineConfig& cfg) {
    json doc;
    doc["visualization_mime_types"] = cfg.visualization_mimes;
    doc["cleaning"] = {{"english_letter_ratio_min", cfg.cleaning.english_letter_ratio_min},
                       {"length_percentile_cut", cfg.cleaning.length_percentile_cut}};
    doc["scoring"] = {{"alpha", cfg.scoring.alpha}, {"min_views", cfg.scoring.min_views}};
    doc["model"] = {{"n_trees", cfg.forest.n_trees},
                    {"max_depth", cfg.forest.max_depth},
                    {"min_samples_leaf", cfg.forest.min_samples_leaf},
                    {"features_per_split", cfg.forest.features_per_split}};
    doc["seed"] = cfg.seed;
    doc["paths"] = cfg.paths;
    return doc.dump(1);
}

}  // namespace nblens
