#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "nblens/dataset.hpp"

namespace nblens {

// Binary CART node. feature == -1 marks a leaf. Routing is left when
// value <= threshold. class_counts holds training counts per class index at
// every node; they drive leaf probabilities, impurity importances and the
// path-dependent attribution weights.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::vector<double> class_counts;

    bool is_leaf() const { return feature < 0; }
    double n_samples() const {
        double n = 0.0;
        for (double c : class_counts) n += c;
        return n;
    }
};

struct TreeModel {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    std::vector<int> class_labels;  // sorted distinct training labels
    std::size_t n_features = 0;
    long max_depth = -1;  // -1 = unbounded
    long min_samples_leaf = 1;

    // Leaf class fractions at x. Errors: WidthMismatch, NonFiniteValue.
    std::vector<double> proba(std::span<const double> x) const;
    int predict(std::span<const double> x) const;  // argmax, lowest label on ties
    std::map<int, double> predict_proba(std::span<const double> x) const;
    int leaf_index(std::span<const double> x) const;
};

struct ForestModel {
    std::vector<TreeModel> trees;
    long n_trees = 0;
    int features_per_split = 0;  // 0 = all
    std::uint64_t seed = 0;

    std::size_t n_features() const { return trees.empty() ? 0 : trees.front().n_features; }
    const std::vector<int>& class_labels() const { return trees.front().class_labels; }

    // Mean of per-tree leaf fractions.
    std::vector<double> proba(std::span<const double> x) const;
    std::map<int, double> predict_proba(std::span<const double> x) const;
    // Majority vote over trees, lowest label on ties.
    int predict(std::span<const double> x) const;
};

struct TreeConfig {
    long max_depth = -1;        // -1 = unbounded
    long min_samples_leaf = 1;
    int features_per_split = 0; // 0 = consider every feature
};

// Gini CART with exhaustive midpoint threshold search. Ties in gain resolve
// to the lowest feature index, then the lowest threshold. A single-class
// dataset yields a single-leaf tree.
// Errors: EmptyDataset.
TreeModel train_tree(const Dataset& d, TreeConfig cfg, std::uint64_t seed);

struct ForestConfig {
    long n_trees = 100;
    long max_depth = -1;
    long min_samples_leaf = 1;
    int features_per_split = -1;  // -1 = floor(sqrt(width))
};

// Bootstrapped trees; tree t draws its randomness from mix(seed, t), so the
// forest is identical no matter how tree training is scheduled.
ForestModel train_forest(const Dataset& d, ForestConfig cfg, std::uint64_t seed);

}  // namespace nblens
