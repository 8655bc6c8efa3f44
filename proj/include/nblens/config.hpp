#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>

#include "nblens/comments.hpp"
#include "nblens/scoring.hpp"
#include "nblens/tree.hpp"

namespace nblens {

// Whole-pipeline configuration, loadable from a JSON file. Unknown keys are
// rejected so typos cannot silently fall back to defaults.
struct PipelineConfig {
    std::set<std::string> visualization_mimes = kDefaultVisualizationMimes;
    CleaningConfig cleaning;
    ScoringConfig scoring;
    ForestConfig forest;
    std::uint64_t seed = 17;
    std::map<std::string, std::string> paths;  // optional default IO paths

    std::string path_or(const std::string& key, const std::string& fallback) const {
        auto it = paths.find(key);
        return it == paths.end() ? fallback : it->second;
    }
};

// Errors: ConfigError (bad JSON, unknown key, out-of-range value), IoError.
PipelineConfig load_pipeline_config(const std::string& path);
PipelineConfig parse_pipeline_config(const std::string& text);
std::string serialize_pipeline_config(const PipelineConfig& cfg);

}  // namespace nblens
