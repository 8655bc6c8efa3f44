#include "nblens/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nblens/errors.hpp"
#include "nblens/rng.hpp"

namespace nblens {

void Dataset::validate() const {
    if (width() == 0) fail("EmptyDataset", "dataset has no features");
    if (x.size() != y.size() * width())
        fail("LengthMismatch", "feature matrix and label vector disagree");
    if (!ids.empty() && ids.size() != y.size())
        fail("LengthMismatch", "id column and label vector disagree");
    for (double v : x)
        if (!std::isfinite(v)) fail("NonFiniteValue", "dataset holds a non-finite feature value");
}

std::array<std::size_t, 3> split_sizes(std::size_t n, SplitRatios ratios) {
    std::array<double, 3> r = {ratios.train, ratios.eval, ratios.test};
    double sum = r[0] + r[1] + r[2];
    if (r[0] <= 0 || r[1] <= 0 || r[2] <= 0 || std::abs(sum - 1.0) > 1e-9)
        fail("BadRatios", "split ratios must be positive and sum to 1");

    std::array<std::size_t, 3> sizes{};
    std::array<double, 3> remainder{};
    std::size_t assigned = 0;
    for (int i = 0; i < 3; ++i) {
        double quota = r[i] * static_cast<double>(n);
        sizes[i] = static_cast<std::size_t>(std::floor(quota));
        remainder[i] = quota - std::floor(quota);
        assigned += sizes[i];
    }
    // Largest remainder takes the leftovers; ties go to the earlier part.
    std::array<int, 3> order = {0, 1, 2};
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return remainder[a] > remainder[b]; });
    for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++sizes[order[k % 3]];
    return sizes;
}

std::array<Dataset, 3> split_dataset(const Dataset& d, SplitRatios ratios, std::uint64_t seed) {
    d.validate();
    auto sizes = split_sizes(d.rows(), ratios);

    std::vector<std::size_t> indices(d.rows());
    std::iota(indices.begin(), indices.end(), 0);
    Rng rng(seed);
    rng.shuffle(indices);

    std::array<Dataset, 3> parts;
    std::size_t cursor = 0;
    for (int p = 0; p < 3; ++p) {
        parts[p].feature_names = d.feature_names;
        for (std::size_t k = 0; k < sizes[p]; ++k, ++cursor) {
            std::size_t i = indices[cursor];
            auto row = d.row(i);
            parts[p].x.insert(parts[p].x.end(), row.begin(), row.end());
            parts[p].y.push_back(d.y[i]);
            if (!d.ids.empty()) parts[p].ids.push_back(d.ids[i]);
        }
    }
    return parts;
}

}  // namespace nblens
