#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nblens/tree.hpp"

namespace nblens {

// Additive per-feature attribution of the positive-class probability.
// base + sum(phi) equals the model's predicted probability for the
// explained class (local accuracy).
struct ShapValues {
    std::vector<double> phi;
    double base = 0.0;
};

// Path-dependent tree attribution: interior weights come from training
// sample fractions stored at the nodes. class_index -1 explains the last
// class, which is the positive/GCU slot in binary models.
// Errors: WidthMismatch.
ShapValues tree_shap(const TreeModel& tree, std::span<const double> x, int class_index = -1);
ShapValues tree_shap(const ForestModel& forest, std::span<const double> x, int class_index = -1);

// Mean accuracy drop over seeded column shuffles.
std::vector<double> permutation_importance(const TreeModel& model, const Dataset& d,
                                           std::uint64_t seed, int repeats);
std::vector<double> permutation_importance(const ForestModel& model, const Dataset& d,
                                           std::uint64_t seed, int repeats);

// Sample-fraction-weighted Gini gains per feature, normalized to sum 1;
// an all-leaf model yields the zero vector.
std::vector<double> mean_decrease_impurity(const TreeModel& model);
std::vector<double> mean_decrease_impurity(const ForestModel& model);

}  // namespace nblens
