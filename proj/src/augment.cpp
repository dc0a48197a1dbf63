#include "fuelgan/augment.hpp"

#include <cmath>

#include "fuelgan/errors.hpp"
#include "fuelgan/rng.hpp"

namespace fuelgan::augment {

double feature_std(std::span<const double> values) {
    if (values.size() < 2) throw ArgumentError("feature_std: need at least 2 values");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double acc = 0.0;
    for (double v : values) {
        const double d = v - mean;
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(values.size()));
}

std::vector<double> feature_stds(const ProcessedDataset& ds) {
    const std::vector<std::size_t> train = train_indices(ds);
    if (train.size() < 2) throw ArgumentError("feature_stds: need at least 2 training rows");
    std::vector<double> sigmas(ds.feature_count());
    std::vector<double> column(train.size());
    for (std::size_t j = 0; j < ds.feature_count(); ++j) {
        for (std::size_t i = 0; i < train.size(); ++i) column[i] = ds.features(train[i], j);
        sigmas[j] = feature_std(column);
    }
    return sigmas;
}

ProcessedDataset augment(const ProcessedDataset& ds, const AugmentConfig& config) {
    if (config.copies_per_row == 0 && !config.include_originals) {
        throw ArgumentError("augment: zero copies and originals excluded would produce "
                            "an empty dataset");
    }
    const std::vector<double> sigmas = feature_stds(ds);
    const std::vector<std::size_t> train = train_indices(ds);

    const std::size_t original_count = config.include_originals ? ds.rows() : 0;
    const std::size_t copy_count = train.size() * config.copies_per_row;
    const std::size_t total = original_count + copy_count;

    ProcessedDataset out;
    out.feature_names = ds.feature_names;
    out.features = Matrix(total, ds.feature_count());
    out.labels.resize(total);
    out.split.resize(total);
    out.dates.resize(total);
    out.source_rows.resize(total);
    out.rules_fingerprint = ds.rules_fingerprint;
    out.config_fingerprint = ds.config_fingerprint;

    if (config.include_originals) {
        for (std::size_t i = 0; i < ds.rows(); ++i) {
            for (std::size_t j = 0; j < ds.feature_count(); ++j) {
                out.features(i, j) = ds.features(i, j);
            }
            out.labels[i] = ds.labels[i];
            out.split[i] = ds.split[i];
            out.dates[i] = ds.dates.size() == ds.rows() ? ds.dates[i] : std::string();
            out.source_rows[i] = static_cast<long long>(i);
        }
    }

    const Rng base(config.seed);
#pragma omp parallel for schedule(static)
    for (long long cc = 0; cc < static_cast<long long>(copy_count); ++cc) {
        const auto c = static_cast<std::size_t>(cc);
        const std::size_t src = train[c / config.copies_per_row];
        const std::size_t dst = original_count + c;
        Rng rng = base.substream(c);
        for (std::size_t j = 0; j < ds.feature_count(); ++j) {
            out.features(dst, j) = ds.features(src, j) + rng.uniform01() * sigmas[j];
        }
        out.labels[dst] = ds.labels[src];
        out.split[dst] = ds.split[src];
        out.source_rows[dst] = static_cast<long long>(src);
    }
    // Dates for copies stay empty (a copy has no visit date of its own); the
    // parallel loop above does not touch strings.

    out.scaler = fit_scaler(out.features, out.split);
    return out;
}

} // namespace fuelgan::augment
