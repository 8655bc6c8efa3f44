#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace nblens {

// Row-major feature matrix with integer class labels. Width follows
// feature_names; the production pipeline uses the frozen 34-column set but
// the learners accept any width.
struct Dataset {
    std::vector<std::string> feature_names;
    std::vector<double> x;  // n * width, row major
    std::vector<int> y;
    std::vector<std::string> ids;  // optional, parallel to rows when present

    std::size_t width() const { return feature_names.size(); }
    std::size_t rows() const { return feature_names.empty() ? 0 : x.size() / feature_names.size(); }
    std::span<const double> row(std::size_t i) const {
        return {x.data() + i * width(), width()};
    }

    // Errors: NonFiniteValue, LengthMismatch.
    void validate() const;
};

struct SplitRatios {
    double train = 0.7;
    double eval = 0.2;
    double test = 0.1;
};

// Seeded shuffle, then largest-remainder apportionment so every part sits
// within one sample of its exact quota.
// Errors: BadRatios.
std::array<Dataset, 3> split_dataset(const Dataset& d, SplitRatios ratios, std::uint64_t seed);

// Part sizes alone, exposed for tests.
std::array<std::size_t, 3> split_sizes(std::size_t n, SplitRatios ratios);

}  // namespace nblens
