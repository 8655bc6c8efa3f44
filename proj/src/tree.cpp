#include "nblens/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nblens/errors.hpp"
#include "nblens/rng.hpp"

namespace nblens {

namespace {

void check_input(std::span<const double> x, std::size_t width) {
    if (x.size() != width)
        fail("WidthMismatch", "input width " + std::to_string(x.size()) + " != model width " +
                                  std::to_string(width));
    for (double v : x)
        if (!std::isfinite(v)) fail("NonFiniteValue", "prediction input holds a non-finite value");
}

double gini(const std::vector<double>& counts, double total) {
    if (total <= 0.0) return 0.0;
    double g = 1.0;
    for (double c : counts) {
        double p = c / total;
        g -= p * p;
    }
    return g;
}

struct BestSplit {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

class TreeBuilder {
public:
    TreeBuilder(const Dataset& d, const std::vector<int>& class_index, std::size_t n_classes,
                TreeConfig cfg, Rng& rng)
        : d_(d), class_index_(class_index), n_classes_(n_classes), cfg_(cfg), rng_(rng) {}

    int build(std::vector<std::size_t>& indices, long depth, TreeModel* model) {
        TreeNode node;
        node.class_counts.assign(n_classes_, 0.0);
        for (std::size_t i : indices) node.class_counts[class_index_[i]] += 1.0;
        int node_id = static_cast<int>(model->nodes.size());
        model->nodes.push_back(node);

        bool pure = std::count_if(node.class_counts.begin(), node.class_counts.end(),
                                  [](double c) { return c > 0.0; }) <= 1;
        bool depth_allows = cfg_.max_depth < 0 || depth < cfg_.max_depth;
        if (pure || !depth_allows ||
            indices.size() < 2 * static_cast<std::size_t>(cfg_.min_samples_leaf)) {
            return node_id;
        }

        BestSplit best = find_best_split(indices, node.class_counts);
        if (!best.found) return node_id;

        std::vector<std::size_t> left, right;
        left.reserve(indices.size());
        right.reserve(indices.size());
        for (std::size_t i : indices) {
            if (d_.row(i)[best.feature] <= best.threshold)
                left.push_back(i);
            else
                right.push_back(i);
        }
        indices.clear();
        indices.shrink_to_fit();

        int left_id = build(left, depth + 1, model);
        int right_id = build(right, depth + 1, model);
        model->nodes[node_id].feature = best.feature;
        model->nodes[node_id].threshold = best.threshold;
        model->nodes[node_id].left = left_id;
        model->nodes[node_id].right = right_id;
        return node_id;
    }

private:
    std::vector<int> candidate_features() {
        std::size_t width = d_.width();
        std::vector<int> all(width);
        std::iota(all.begin(), all.end(), 0);
        int k = cfg_.features_per_split;
        if (k <= 0 || static_cast<std::size_t>(k) >= width) return all;
        // partial Fisher-Yates, then ascending order for the tie-break rule
        for (int i = 0; i < k; ++i) {
            std::size_t j = i + static_cast<std::size_t>(rng_.below(width - i));
            std::swap(all[i], all[j]);
        }
        all.resize(k);
        std::sort(all.begin(), all.end());
        return all;
    }

    BestSplit find_best_split(const std::vector<std::size_t>& indices,
                              const std::vector<double>& total_counts) {
        BestSplit best;
        double total = static_cast<double>(indices.size());
        double parent_gini = gini(total_counts, total);
        std::size_t msl = static_cast<std::size_t>(cfg_.min_samples_leaf);

        std::vector<std::pair<double, int>> column(indices.size());
        std::vector<double> left_counts(n_classes_), right_counts(n_classes_);
        for (int f : candidate_features()) {
            for (std::size_t k = 0; k < indices.size(); ++k) {
                std::size_t i = indices[k];
                column[k] = {d_.row(i)[f], class_index_[i]};
            }
            std::sort(column.begin(), column.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });

            std::fill(left_counts.begin(), left_counts.end(), 0.0);
            right_counts = total_counts;
            for (std::size_t k = 0; k + 1 < column.size(); ++k) {
                left_counts[column[k].second] += 1.0;
                right_counts[column[k].second] -= 1.0;
                if (column[k].first == column[k + 1].first) continue;
                std::size_t n_left = k + 1;
                std::size_t n_right = column.size() - n_left;
                if (n_left < msl || n_right < msl) continue;

                double threshold =
                    column[k].first + (column[k + 1].first - column[k].first) / 2.0;
                if (threshold >= column[k + 1].first) threshold = column[k].first;

                double weighted = (static_cast<double>(n_left) * gini(left_counts, n_left) +
                                   static_cast<double>(n_right) * gini(right_counts, n_right)) /
                                  total;
                double gain = parent_gini - weighted;
                // Candidates arrive in (feature, threshold) ascending order, so
                // strict improvement keeps the lowest feature/threshold on ties.
                if (!best.found || gain > best.gain) {
                    best = {true, f, threshold, gain};
                }
            }
        }
        return best;
    }

    const Dataset& d_;
    const std::vector<int>& class_index_;  // row -> contiguous class index
    std::size_t n_classes_;
    TreeConfig cfg_;
    Rng& rng_;
};

std::vector<int> distinct_labels(const Dataset& d) {
    std::vector<int> labels = d.y;
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    return labels;
}

TreeModel train_tree_with_rng(const Dataset& d, const std::vector<std::size_t>& sample,
                              TreeConfig cfg, Rng& rng) {
    TreeModel model;
    model.class_labels = distinct_labels(d);
    model.n_features = d.width();
    model.max_depth = cfg.max_depth;
    model.min_samples_leaf = cfg.min_samples_leaf;

    // Remap labels to contiguous class indices once per tree.
    std::vector<int> class_index(d.rows());
    for (std::size_t i = 0; i < d.rows(); ++i) {
        auto it = std::lower_bound(model.class_labels.begin(), model.class_labels.end(), d.y[i]);
        class_index[i] = static_cast<int>(it - model.class_labels.begin());
    }

    std::vector<std::size_t> indices = sample;
    TreeBuilder builder(d, class_index, model.class_labels.size(), cfg, rng);
    builder.build(indices, 0, &model);
    return model;
}

}  // namespace

int TreeModel::leaf_index(std::span<const double> x) const {
    check_input(x, n_features);
    int node = 0;
    while (!nodes[node].is_leaf())
        node = x[nodes[node].feature] <= nodes[node].threshold ? nodes[node].left
                                                               : nodes[node].right;
    return node;
}

std::vector<double> TreeModel::proba(std::span<const double> x) const {
    const TreeNode& leaf = nodes[leaf_index(x)];
    double total = leaf.n_samples();
    std::vector<double> p(leaf.class_counts.size(), 0.0);
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = total > 0.0 ? leaf.class_counts[k] / total : 0.0;
    return p;
}

int TreeModel::predict(std::span<const double> x) const {
    auto p = proba(x);
    std::size_t best = 0;
    for (std::size_t k = 1; k < p.size(); ++k)
        if (p[k] > p[best]) best = k;
    return class_labels[best];
}

std::map<int, double> TreeModel::predict_proba(std::span<const double> x) const {
    auto p = proba(x);
    std::map<int, double> out;
    for (std::size_t k = 0; k < p.size(); ++k) out[class_labels[k]] = p[k];
    return out;
}

std::vector<double> ForestModel::proba(std::span<const double> x) const {
    std::vector<double> mean(class_labels().size(), 0.0);
    for (const TreeModel& tree : trees) {
        auto p = tree.proba(x);
        for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += p[k];
    }
    for (double& v : mean) v /= static_cast<double>(trees.size());
    return mean;
}

std::map<int, double> ForestModel::predict_proba(std::span<const double> x) const {
    auto p = proba(x);
    std::map<int, double> out;
    for (std::size_t k = 0; k < p.size(); ++k) out[class_labels()[k]] = p[k];
    return out;
}

int ForestModel::predict(std::span<const double> x) const {
    std::vector<long> votes(class_labels().size(), 0);
    for (const TreeModel& tree : trees) {
        int label = tree.predict(x);
        auto it = std::lower_bound(class_labels().begin(), class_labels().end(), label);
        ++votes[static_cast<std::size_t>(it - class_labels().begin())];
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < votes.size(); ++k)
        if (votes[k] > votes[best]) best = k;
    return class_labels()[best];
}

TreeModel train_tree(const Dataset& d, TreeConfig cfg, std::uint64_t seed) {
    d.validate();
    if (d.rows() == 0) fail("EmptyDataset", "cannot train on zero rows");
    std::vector<std::size_t> all(d.rows());
    std::iota(all.begin(), all.end(), 0);
    Rng rng(seed);
    return train_tree_with_rng(d, all, cfg, rng);
}

ForestModel train_forest(const Dataset& d, ForestConfig cfg, std::uint64_t seed) {
    d.validate();
    if (d.rows() == 0) fail("EmptyDataset", "cannot train on zero rows");
    if (cfg.n_trees < 1) fail("BadConfig", "n_trees must be >= 1");

    int features_per_split = cfg.features_per_split;
    if (features_per_split < 0)
        features_per_split = static_cast<int>(std::floor(std::sqrt(static_cast<double>(d.width()))));

    ForestModel forest;
    forest.n_trees = cfg.n_trees;
    forest.features_per_split = features_per_split;
    forest.seed = seed;
    forest.trees.reserve(cfg.n_trees);

    TreeConfig tree_cfg{cfg.max_depth, cfg.min_samples_leaf, features_per_split};
    for (long t = 0; t < cfg.n_trees; ++t) {
        Rng rng(Rng::mix(seed, static_cast<std::uint64_t>(t)));
        std::vector<std::size_t> bootstrap(d.rows());
        for (auto& i : bootstrap) i = static_cast<std::size_t>(rng.below(d.rows()));
        forest.trees.push_back(train_tree_with_rng(d, bootstrap, tree_cfg, rng));
    }
    return forest;
}

}  // namespace nblens
