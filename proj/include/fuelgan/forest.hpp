#ifndef FUELGAN_FOREST_HPP
#define FUELGAN_FOREST_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fuelgan/matrix.hpp"

namespace fuelgan::forest {

struct ForestConfig {
    std::size_t tree_count = 100;
    std::size_t max_depth = 12;
    std::size_t min_samples_split = 2;
    std::size_t features_per_split = 0;  // 0 = ceil(sqrt(feature count))
    bool bootstrap = true;
    std::uint64_t seed = 42;
};

void validate(const ForestConfig& config);

// Flat CART node. feature < 0 marks a leaf.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::size_t count_normal = 0;     // leaf class counts
    std::size_t count_anomalous = 0;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;
    std::vector<double> importance;      // un-normalized impurity decrease per feature
    std::vector<std::uint8_t> in_bag;    // per training row, for OOB bookkeeping
};

struct Forest {
    ForestConfig config;
    std::vector<DecisionTree> trees;
    std::size_t feature_count = 0;
};

// Trains tree_count Gini CART trees on bootstrap samples; deterministic per
// seed and thread-count independent (per-tree rng substreams, tree-ordered
// aggregation). Needs >= 2 rows with both classes present.
Forest fit(const Matrix& x, const std::vector<int>& y, const ForestConfig& config);

// Per-row majority vote over trees.
std::vector<int> predict(const Forest& forest, const Matrix& rows);

// Accuracy over rows that are out-of-bag for at least one tree.
double oob_accuracy(const Forest& forest, const Matrix& x, const std::vector<int>& y);

struct ImportanceReport {
    std::vector<double> importance;      // non-negative, sums to 1
    std::vector<std::size_t> ranking;    // feature indices, descending importance
};

// Mean decrease in Gini impurity, aggregated over trees, normalized to sum 1.
ImportanceReport feature_importance(const Forest& forest);

void write_importance_csv(const std::string& path, const std::vector<std::string>& names,
                          const ImportanceReport& report, const ForestConfig& config,
                          const std::string& config_fingerprint);

} // namespace fuelgan::forest

#endif
