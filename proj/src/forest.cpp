#include "fuelgan/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fuelgan/csv.hpp"
#include "fuelgan/errors.hpp"
#include "fuelgan/rng.hpp"

namespace fuelgan::forest {

namespace {

double gini(std::size_t n0, std::size_t n1) {
    const double n = static_cast<double>(n0 + n1);
    if (n == 0.0) return 0.0;
    const double p0 = static_cast<double>(n0) / n;
    const double p1 = static_cast<double>(n1) / n;
    return 1.0 - p0 * p0 - p1 * p1;
}

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;  // impurity decrease at this node, unweighted
};

struct TreeBuilder {
    const Matrix& x;
    const std::vector<int>& y;
    const ForestConfig& config;
    std::size_t mtry;
    std::size_t total_samples;  // bootstrap sample size, for importance weights
    Rng& rng;
    DecisionTree& tree;

    // indices: row ids in this node (bootstrap ids, may repeat)
    int build(std::vector<std::size_t>& indices, std::size_t depth) {
        std::size_t n1 = 0;
        for (std::size_t i : indices) n1 += static_cast<std::size_t>(y[i] == 1);
        const std::size_t n0 = indices.size() - n1;

        const int node_id = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back({});
        tree.nodes[node_id].count_normal = n0;
        tree.nodes[node_id].count_anomalous = n1;

        const bool pure = n0 == 0 || n1 == 0;
        if (pure || depth >= config.max_depth || indices.size() < config.min_samples_split) {
            return node_id;
        }

        const SplitChoice split = best_split(indices, n0, n1);
        if (!split.found) return node_id;

        tree.importance[static_cast<std::size_t>(split.feature)] +=
            static_cast<double>(indices.size()) / static_cast<double>(total_samples) *
            split.gain;

        std::vector<std::size_t> left, right;
        left.reserve(indices.size());
        right.reserve(indices.size());
        for (std::size_t i : indices) {
            (x(i, static_cast<std::size_t>(split.feature)) <= split.threshold ? left : right)
                .push_back(i);
        }
        indices.clear();
        indices.shrink_to_fit();

        const int left_id = build(left, depth + 1);
        const int right_id = build(right, depth + 1);
        tree.nodes[node_id].feature = split.feature;
        tree.nodes[node_id].threshold = split.threshold;
        tree.nodes[node_id].left = left_id;
        tree.nodes[node_id].right = right_id;
        return node_id;
    }

    SplitChoice best_split(const std::vector<std::size_t>& indices, std::size_t n0,
                           std::size_t n1) {
        // Sample mtry distinct feature indices, then evaluate in ascending
        // order so equal gains resolve to the lowest feature index and, per
        // feature, the lowest threshold ("first strictly better wins").
        std::vector<std::size_t> features(x.cols());
        std::iota(features.begin(), features.end(), 0);
        for (std::size_t i = 0; i < mtry; ++i) {
            const std::size_t j = i + rng.next_below(features.size() - i);
            std::swap(features[i], features[j]);
        }
        features.resize(mtry);
        std::sort(features.begin(), features.end());

        const double parent = gini(n0, n1);
        const double n = static_cast<double>(indices.size());

        SplitChoice best;
        std::vector<std::pair<double, int>> values(indices.size());
        for (std::size_t f : features) {
            for (std::size_t i = 0; i < indices.size(); ++i) {
                values[i] = {x(indices[i], f), y[indices[i]]};
            }
            std::sort(values.begin(), values.end());

            std::size_t left0 = 0, left1 = 0;
            for (std::size_t i = 0; i + 1 < values.size(); ++i) {
                left1 += static_cast<std::size_t>(values[i].second == 1);
                left0 += static_cast<std::size_t>(values[i].second != 1);
                if (values[i].first == values[i + 1].first) continue;
                const std::size_t right0 = n0 - left0;
                const std::size_t right1 = n1 - left1;
                const double weighted = (static_cast<double>(left0 + left1) * gini(left0, left1) +
                                         static_cast<double>(right0 + right1) *
                                             gini(right0, right1)) /
                                        n;
                const double gain = parent - weighted;
                if (gain > best.gain && gain > 0.0) {
                    best.found = true;
                    best.feature = static_cast<int>(f);
                    best.threshold = values[i].first +
                                     0.5 * (values[i + 1].first - values[i].first);
                    best.gain = gain;
                }
            }
        }
        return best;
    }
};

int tree_predict(const DecisionTree& tree, const Matrix& rows, std::size_t r) {
    int node = 0;
    while (tree.nodes[node].feature >= 0) {
        const TreeNode& nd = tree.nodes[node];
        node = rows(r, static_cast<std::size_t>(nd.feature)) <= nd.threshold ? nd.left
                                                                             : nd.right;
    }
    const TreeNode& leaf = tree.nodes[node];
    return leaf.count_anomalous > leaf.count_normal ? 1 : 0;
}

} // namespace

void validate(const ForestConfig& config) {
    if (config.tree_count == 0) throw ConfigError("forest: tree count must be >= 1");
    if (config.max_depth == 0) throw ConfigError("forest: max depth must be >= 1");
    if (config.min_samples_split < 2) throw ConfigError("forest: min samples split must be >= 2");
}

Forest fit(const Matrix& x, const std::vector<int>& y, const ForestConfig& config) {
    validate(config);
    if (x.rows() < 2) throw ArgumentError("forest fit: need at least 2 rows");
    if (y.size() != x.rows()) {
        throw DimensionError("forest fit: " + std::to_string(y.size()) + " labels vs " +
                             std::to_string(x.rows()) + " rows");
    }
    bool has0 = false, has1 = false;
    for (int label : y) (label == 1 ? has1 : has0) = true;
    if (!has0 || !has1) {
        throw ArgumentError("forest fit: degenerate input, both classes must be present");
    }

    Forest forest;
    forest.config = config;
    forest.feature_count = x.cols();
    forest.trees.resize(config.tree_count);
    const std::size_t mtry = config.features_per_split != 0
                                 ? std::min(config.features_per_split, x.cols())
                                 : static_cast<std::size_t>(
                                       std::ceil(std::sqrt(static_cast<double>(x.cols()))));

    const Rng base(config.seed);
#pragma omp parallel for schedule(dynamic)
    for (long long tt = 0; tt < static_cast<long long>(config.tree_count); ++tt) {
        const auto t = static_cast<std::size_t>(tt);
        Rng rng = base.substream(t);
        DecisionTree& tree = forest.trees[t];
        tree.importance.assign(x.cols(), 0.0);
        tree.in_bag.assign(x.rows(), 0);

        std::vector<std::size_t> indices(x.rows());
        if (config.bootstrap) {
            for (std::size_t i = 0; i < x.rows(); ++i) {
                indices[i] = rng.next_below(x.rows());
                tree.in_bag[indices[i]] = 1;
            }
        } else {
            std::iota(indices.begin(), indices.end(), 0);
            std::fill(tree.in_bag.begin(), tree.in_bag.end(), 1);
        }

        TreeBuilder builder{x, y, config, mtry, indices.size(), rng, tree};
        builder.build(indices, 0);
    }
    return forest;
}

std::vector<int> predict(const Forest& forest, const Matrix& rows) {
    if (rows.cols() != forest.feature_count) {
        throw DimensionError("forest predict: rows " + rows.shape_str() + " vs " +
                             std::to_string(forest.feature_count) + " features");
    }
    std::vector<int> labels(rows.rows());
#pragma omp parallel for schedule(static)
    for (long long rr = 0; rr < static_cast<long long>(rows.rows()); ++rr) {
        const auto r = static_cast<std::size_t>(rr);
        std::size_t votes1 = 0;
        for (const DecisionTree& tree : forest.trees) {
            votes1 += static_cast<std::size_t>(tree_predict(tree, rows, r));
        }
        labels[r] = 2 * votes1 > forest.trees.size() ? 1 : 0;
    }
    return labels;
}

double oob_accuracy(const Forest& forest, const Matrix& x, const std::vector<int>& y) {
    if (y.size() != x.rows()) throw DimensionError("oob_accuracy: label/row count mismatch");
    std::size_t evaluated = 0;
    std::size_t correct = 0;
    for (std::size_t r = 0; r < x.rows(); ++r) {
        std::size_t votes = 0, votes1 = 0;
        for (const DecisionTree& tree : forest.trees) {
            if (tree.in_bag.size() == x.rows() && !tree.in_bag[r]) {
                ++votes;
                votes1 += static_cast<std::size_t>(tree_predict(tree, x, r));
            }
        }
        if (votes == 0) continue;
        ++evaluated;
        const int pred = 2 * votes1 > votes ? 1 : 0;
        correct += static_cast<std::size_t>(pred == y[r]);
    }
    if (evaluated == 0) throw StateError("oob_accuracy: no out-of-bag rows");
    return static_cast<double>(correct) / static_cast<double>(evaluated);
}

ImportanceReport feature_importance(const Forest& forest) {
    if (forest.trees.empty()) throw StateError("feature_importance: forest not fitted");
    ImportanceReport report;
    report.importance.assign(forest.feature_count, 0.0);
    // Tree-ordered serial aggregation keeps the result independent of how the
    // fit was scheduled.
    for (const DecisionTree& tree : forest.trees) {
        const double total =
            std::accumulate(tree.importance.begin(), tree.importance.end(), 0.0);
        if (total <= 0.0) continue;
        for (std::size_t f = 0; f < forest.feature_count; ++f) {
            report.importance[f] += tree.importance[f] / total;
        }
    }
    const double sum =
        std::accumulate(report.importance.begin(), report.importance.end(), 0.0);
    if (sum > 0.0) {
        for (double& v : report.importance) v /= sum;
    }
    report.ranking.resize(forest.feature_count);
    std::iota(report.ranking.begin(), report.ranking.end(), 0);
    std::stable_sort(report.ranking.begin(), report.ranking.end(),
                     [&](std::size_t a, std::size_t b) {
                         return report.importance[a] > report.importance[b];
                     });
    return report;
}

void write_importance_csv(const std::string& path, const std::vector<std::string>& names,
                          const ImportanceReport& report, const ForestConfig& config,
                          const std::string& config_fingerprint) {
    if (names.size() != report.importance.size()) {
        throw DimensionError("importance csv: name/importance count mismatch");
    }
    std::vector<std::string> comments = {
        "config_fingerprint=" + config_fingerprint,
        "forest: trees=" + std::to_string(config.tree_count) +
            " max_depth=" + std::to_string(config.max_depth) +
            " min_samples_split=" + std::to_string(config.min_samples_split) +
            " features_per_split=" + std::to_string(config.features_per_split) +
            " bootstrap=" + (config.bootstrap ? std::string("true") : std::string("false")) +
            " seed=" + std::to_string(config.seed),
    };
    std::vector<std::string> lines;
    for (std::size_t rank = 0; rank < report.ranking.size(); ++rank) {
        const std::size_t f = report.ranking[rank];
        lines.push_back(names[f] + "," + csv::format_double(report.importance[f]) + "," +
                        std::to_string(rank + 1));
    }
    csv::write_file(path, comments, "feature,importance,rank", lines);
}

} // namespace fuelgan::forest
