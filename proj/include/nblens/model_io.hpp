#pragma once

#include <string>
#include <vector>

#include "nblens/tree.hpp"

namespace nblens {

// A trained model plus everything prediction needs: the feature columns it
// was trained on and the class-name mapping for reporting.
struct ModelBundle {
    std::string kind = "rf";  // "rf" or "tree"
    ForestModel forest;       // single-tree models ship as a one-tree forest
    std::vector<std::string> feature_names;
    std::vector<std::string> class_names;  // parallel to class_labels

    const std::string& class_name(int label) const;
};

// Versioned JSON persistence with the full node arrays.
// Errors: IoError, ModelFormat.
void save_model(const ModelBundle& bundle, const std::string& path);
ModelBundle load_model(const std::string& path);

// Errors: FeatureNamesMismatch when a model feature is missing from the
// available columns. Returns the column index per model feature.
std::vector<std::size_t> feature_column_map(const std::vector<std::string>& model_features,
                                            const std::vector<std::string>& available);

int current_model_format_version();

}  // namespace nblens
