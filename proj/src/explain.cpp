#include "nblens/explain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nblens/errors.hpp"
#include "nblens/rng.hpp"

namespace nblens {

namespace {

int resolve_class_index(const std::vector<int>& labels, int class_index) {
    if (class_index < 0) return static_cast<int>(labels.size()) - 1;
    if (class_index >= static_cast<int>(labels.size()))
        fail("WidthMismatch", "class index out of range");
    return class_index;
}

double leaf_value(const TreeNode& node, int class_index) {
    double total = node.n_samples();
    return total > 0.0 ? node.class_counts[class_index] / total : 0.0;
}

// The decomposition walks root-to-leaf paths carrying, per encountered
// feature, the covered fraction (zero_fraction), whether the instance
// follows the branch (one_fraction), and a weight per subset size.
struct PathElement {
    int feature_index = -1;
    double zero_fraction = 0.0;
    double one_fraction = 0.0;
    double pweight = 0.0;
};

void extend_path(std::vector<PathElement>& path, double zero_fraction, double one_fraction,
                 int feature_index) {
    int depth = static_cast<int>(path.size());
    path.push_back({feature_index, zero_fraction, one_fraction, depth == 0 ? 1.0 : 0.0});
    for (int i = depth - 1; i >= 0; --i) {
        path[i + 1].pweight += one_fraction * path[i].pweight * (i + 1) /
                               static_cast<double>(depth + 1);
        path[i].pweight = zero_fraction * path[i].pweight * (depth - i) /
                          static_cast<double>(depth + 1);
    }
}

void unwind_path(std::vector<PathElement>& path, int index) {
    int depth = static_cast<int>(path.size()) - 1;
    double next = path[depth].pweight;
    if (path[index].one_fraction != 0.0) {
        for (int j = depth - 1; j >= 0; --j) {
            double tmp = path[j].pweight;
            path[j].pweight = next * (depth + 1) /
                              (static_cast<double>(j + 1) * path[index].one_fraction);
            next = tmp - path[j].pweight * path[index].zero_fraction * (depth - j) /
                             static_cast<double>(depth + 1);
        }
    } else {
        for (int j = depth - 1; j >= 0; --j) {
            path[j].pweight = path[j].pweight * (depth + 1) /
                              (path[index].zero_fraction * static_cast<double>(depth - j));
        }
    }
    for (int j = index; j < depth; ++j) {
        path[j].feature_index = path[j + 1].feature_index;
        path[j].zero_fraction = path[j + 1].zero_fraction;
        path[j].one_fraction = path[j + 1].one_fraction;
    }
    path.pop_back();
}

double unwound_path_sum(const std::vector<PathElement>& path, int index) {
    int depth = static_cast<int>(path.size()) - 1;
    double total = 0.0;
    if (path[index].one_fraction != 0.0) {
        double next = path[depth].pweight;
        for (int j = depth - 1; j >= 0; --j) {
            double tmp = next / (static_cast<double>(j + 1) * path[index].one_fraction);
            total += tmp;
            next = path[j].pweight - tmp * path[index].zero_fraction * (depth - j);
        }
    } else {
        for (int j = depth - 1; j >= 0; --j) {
            total += path[j].pweight /
                     (path[index].zero_fraction * static_cast<double>(depth - j));
        }
    }
    return total * (depth + 1);
}

void shap_recurse(const TreeModel& tree, std::span<const double> x, int class_index,
                  std::vector<double>& phi, std::vector<PathElement> path, int node_id,
                  double zero_fraction, double one_fraction, int feature_index) {
    extend_path(path, zero_fraction, one_fraction, feature_index);
    const TreeNode& node = tree.nodes[node_id];

    if (node.is_leaf()) {
        double value = leaf_value(node, class_index);
        for (std::size_t i = 1; i < path.size(); ++i) {
            double sum = unwound_path_sum(path, static_cast<int>(i));
            phi[path[i].feature_index] +=
                sum * (path[i].one_fraction - path[i].zero_fraction) * value;
        }
        return;
    }

    const TreeNode& left = tree.nodes[node.left];
    const TreeNode& right = tree.nodes[node.right];
    bool goes_left = x[node.feature] <= node.threshold;
    int hot = goes_left ? node.left : node.right;
    int cold = goes_left ? node.right : node.left;
    double hot_fraction = (goes_left ? left.n_samples() : right.n_samples()) / node.n_samples();
    double cold_fraction = 1.0 - hot_fraction;

    // Undo an earlier split on the same feature along this path.
    double incoming_zero = 1.0;
    double incoming_one = 1.0;
    for (std::size_t k = 1; k < path.size(); ++k) {
        if (path[k].feature_index == node.feature) {
            incoming_zero = path[k].zero_fraction;
            incoming_one = path[k].one_fraction;
            unwind_path(path, static_cast<int>(k));
            break;
        }
    }

    shap_recurse(tree, x, class_index, phi, path, hot, incoming_zero * hot_fraction,
                 incoming_one, node.feature);
    shap_recurse(tree, x, class_index, phi, path, cold, incoming_zero * cold_fraction, 0.0,
                 node.feature);
}

double expected_value(const TreeModel& tree, int node_id, int class_index) {
    const TreeNode& node = tree.nodes[node_id];
    if (node.is_leaf()) return leaf_value(node, class_index);
    double total = node.n_samples();
    const TreeNode& left = tree.nodes[node.left];
    const TreeNode& right = tree.nodes[node.right];
    return (left.n_samples() / total) * expected_value(tree, node.left, class_index) +
           (right.n_samples() / total) * expected_value(tree, node.right, class_index);
}

double impurity(const TreeNode& node) {
    double total = node.n_samples();
    if (total <= 0.0) return 0.0;
    double g = 1.0;
    for (double c : node.class_counts) {
        double p = c / total;
        g -= p * p;
    }
    return g;
}

template <typename Model>
std::vector<double> permutation_importance_impl(const Model& model, const Dataset& d,
                                                std::uint64_t seed, int repeats) {
    d.validate();
    if (d.rows() == 0) fail("EmptyDataset", "permutation importance over an empty dataset");
    if (repeats < 1) fail("BadConfig", "repeats must be >= 1");

    auto accuracy_of = [&](const Dataset& data) {
        long correct = 0;
        for (std::size_t i = 0; i < data.rows(); ++i)
            if (model.predict(data.row(i)) == data.y[i]) ++correct;
        return static_cast<double>(correct) / static_cast<double>(data.rows());
    };

    double baseline = accuracy_of(d);
    std::vector<double> importances(d.width(), 0.0);
    Rng rng(seed);
    Dataset shuffled = d;
    for (std::size_t f = 0; f < d.width(); ++f) {
        double drop_sum = 0.0;
        for (int r = 0; r < repeats; ++r) {
            std::vector<double> column(d.rows());
            for (std::size_t i = 0; i < d.rows(); ++i) column[i] = d.row(i)[f];
            rng.shuffle(column);
            for (std::size_t i = 0; i < d.rows(); ++i)
                shuffled.x[i * d.width() + f] = column[i];
            drop_sum += baseline - accuracy_of(shuffled);
        }
        for (std::size_t i = 0; i < d.rows(); ++i)
            shuffled.x[i * d.width() + f] = d.row(i)[f];
        importances[f] = drop_sum / static_cast<double>(repeats);
    }
    return importances;
}

}  // namespace

ShapValues tree_shap(const TreeModel& tree, std::span<const double> x, int class_index) {
    if (x.size() != tree.n_features)
        fail("WidthMismatch", "input width does not match the model");
    for (double v : x)
        if (!std::isfinite(v)) fail("NonFiniteValue", "attribution input holds a non-finite value");
    int target = resolve_class_index(tree.class_labels, class_index);

    ShapValues result;
    result.phi.assign(tree.n_features, 0.0);
    result.base = expected_value(tree, 0, target);
    if (!tree.nodes.front().is_leaf())
        shap_recurse(tree, x, target, result.phi, {}, 0, 1.0, 1.0, -1);
    return result;
}

ShapValues tree_shap(const ForestModel& forest, std::span<const double> x, int class_index) {
    ShapValues mean;
    mean.phi.assign(forest.n_features(), 0.0);
    for (const TreeModel& tree : forest.trees) {
        ShapValues one = tree_shap(tree, x, class_index);
        mean.base += one.base;
        for (std::size_t f = 0; f < mean.phi.size(); ++f) mean.phi[f] += one.phi[f];
    }
    double n = static_cast<double>(forest.trees.size());
    mean.base /= n;
    for (double& v : mean.phi) v /= n;
    return mean;
}

std::vector<double> permutation_importance(const TreeModel& model, const Dataset& d,
                                           std::uint64_t seed, int repeats) {
    return permutation_importance_impl(model, d, seed, repeats);
}

std::vector<double> permutation_importance(const ForestModel& model, const Dataset& d,
                                           std::uint64_t seed, int repeats) {
    return permutation_importance_impl(model, d, seed, repeats);
}

std::vector<double> mean_decrease_impurity(const TreeModel& model) {
    std::vector<double> gains(model.n_features, 0.0);
    double root_samples = model.nodes.empty() ? 0.0 : model.nodes.front().n_samples();
    if (root_samples <= 0.0) return gains;
    for (const TreeNode& node : model.nodes) {
        if (node.is_leaf()) continue;
        const TreeNode& left = model.nodes[node.left];
        const TreeNode& right = model.nodes[node.right];
        double n = node.n_samples();
        double weighted_children =
            (left.n_samples() * impurity(left) + right.n_samples() * impurity(right)) / n;
        double gain = impurity(node) - weighted_children;
        gains[node.feature] += (n / root_samples) * gain;
    }
    double total = std::accumulate(gains.begin(), gains.end(), 0.0);
    if (total > 0.0)
        for (double& g : gains) g /= total;
    return gains;
}

std::vector<double> mean_decrease_impurity(const ForestModel& model) {
    std::vector<double> mean(model.n_features(), 0.0);
    for (const TreeModel& tree : model.trees) {
        auto per_tree = mean_decrease_impurity(tree);
        for (std::size_t f = 0; f < mean.size(); ++f) mean[f] += per_tree[f];
    }
    double total = std::accumulate(mean.begin(), mean.end(), 0.0);
    if (total > 0.0)
        for (double& v : mean) v /= total;
    return mean;
}

}  // namespace nblens
