#include "nblens/model_io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "nblens/errors.hpp"

namespace nblens {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

json tree_to_json(const TreeModel& tree) {
    json t;
    json feature = json::array(), threshold = json::array(), left = json::array(),
         right = json::array(), counts = json::array();
    for (const TreeNode& node : tree.nodes) {
        feature.push_back(node.feature);
        threshold.push_back(node.threshold);
        left.push_back(node.left);
        right.push_back(node.right);
        counts.push_back(node.class_counts);
    }
    t["feature"] = feature;
    t["threshold"] = threshold;
    t["left"] = left;
    t["right"] = right;
    t["class_counts"] = counts;
    return t;
}

TreeModel tree_from_json(const json& t, std::size_t n_features,
                         const std::vector<int>& class_labels) {
    TreeModel tree;
    tree.n_features = n_features;
    tree.class_labels = class_labels;
    const auto& feature = t.at("feature");
    const auto& threshold = t.at("threshold");
    const auto& left = t.at("left");
    const auto& right = t.at("right");
    const auto& counts = t.at("class_counts");
    std::size_t n = feature.size();
    if (threshold.size() != n || left.size() != n || right.size() != n || counts.size() != n)
        fail("ModelFormat", "tree arrays disagree in length");
    tree.nodes.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        TreeNode& node = tree.nodes[i];
        node.feature = feature[i].get<int>();
        node.threshold = threshold[i].get<double>();
        node.left = left[i].get<int>();
        node.right = right[i].get<int>();
        node.class_counts = counts[i].get<std::vector<double>>();
        if (node.class_counts.size() != class_labels.size())
            fail("ModelFormat", "node class counts disagree with class labels");
        // nodes are stored in preorder, so child links always point forward;
        // enforcing that makes routing provably terminate on any loaded file
        bool leaf_links = node.left < 0 && node.right < 0;
        bool inner_links = node.left > static_cast<int>(i) && node.right > static_cast<int>(i) &&
                           node.left < static_cast<int>(n) && node.right < static_cast<int>(n);
        if (node.is_leaf() ? !leaf_links : !inner_links)
            fail("ModelFormat", "node " + std::to_string(i) + " has inconsistent links");
        if (!node.is_leaf() && node.feature >= static_cast<int>(n_features))
            fail("ModelFormat", "node " + std::to_string(i) + " splits on an unknown feature");
    }
    return tree;
}

}  // namespace

const std::string& ModelBundle::class_name(int label) const {
    const auto& labels = forest.class_labels();
    for (std::size_t k = 0; k < labels.size(); ++k)
        if (labels[k] == label) return class_names[k];
    fail("ModelFormat", "unknown class label " + std::to_string(label));
}

void save_model(const ModelBundle& bundle, const std::string& path) {
    json doc;
    doc["format_version"] = kFormatVersion;
    doc["kind"] = bundle.kind;
    doc["feature_names"] = bundle.feature_names;
    doc["class_labels"] = bundle.forest.class_labels();
    doc["class_names"] = bundle.class_names;
    doc["hyperparameters"] = {
        {"n_trees", bundle.forest.n_trees},
        {"max_depth", bundle.forest.trees.front().max_depth},
        {"min_samples_leaf", bundle.forest.trees.front().min_samples_leaf},
        {"features_per_split", bundle.forest.features_per_split},
        {"seed", bundle.forest.seed},
    };
    json trees = json::array();
    for (const TreeModel& tree : bundle.forest.trees) trees.push_back(tree_to_json(tree));
    doc["trees"] = trees;

    std::ofstream out(path, std::ios::binary);
    if (!out) fail("IoError", "cannot write " + path);
    out << doc.dump(1) << '\n';
}

ModelBundle load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("IoError", "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    json doc = json::parse(buf.str(), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) fail("ModelFormat", "model file is not JSON: " + path);

    try {
        if (doc.at("format_version").get<int>() != kFormatVersion)
            fail("ModelFormat", "unsupported model format version");
        ModelBundle bundle;
        bundle.kind = doc.at("kind").get<std::string>();
        bundle.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
        bundle.class_names = doc.at("class_names").get<std::vector<std::string>>();
        auto class_labels = doc.at("class_labels").get<std::vector<int>>();
        if (bundle.class_names.size() != class_labels.size())
            fail("ModelFormat", "class names and labels disagree");

        const auto& hp = doc.at("hyperparameters");
        bundle.forest.n_trees = hp.at("n_trees").get<long>();
        bundle.forest.features_per_split = hp.at("features_per_split").get<int>();
        bundle.forest.seed = hp.at("seed").get<std::uint64_t>();
        long max_depth = hp.at("max_depth").get<long>();
        long min_samples_leaf = hp.at("min_samples_leaf").get<long>();

        for (const auto& t : doc.at("trees")) {
            TreeModel tree = tree_from_json(t, bundle.feature_names.size(), class_labels);
            tree.max_depth = max_depth;
            tree.min_samples_leaf = min_samples_leaf;
            bundle.forest.trees.push_back(std::move(tree));
        }
        if (bundle.forest.trees.empty()) fail("ModelFormat", "model holds no trees");
        return bundle;
    } catch (const json::exception& e) {
        fail("ModelFormat", std::string("bad model file: ") + e.what());
    }
}

std::vector<std::size_t> feature_column_map(const std::vector<std::string>& model_features,
                                            const std::vector<std::string>& available) {
    std::vector<std::size_t> map;
    map.reserve(model_features.size());
    for (const auto& name : model_features) {
        auto it = std::find(available.begin(), available.end(), name);
        if (it == available.end())
            fail("FeatureNamesMismatch", "model feature '" + name + "' missing from input columns");
        map.push_back(static_cast<std::size_t>(it - available.begin()));
    }
    return map;
}

int current_model_format_version() { return kFormatVersion; }

}  // namespace nblens
