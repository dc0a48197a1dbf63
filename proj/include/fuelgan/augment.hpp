#ifndef FUELGAN_AUGMENT_HPP
#define FUELGAN_AUGMENT_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "fuelgan/dataset.hpp"

namespace fuelgan::augment {

struct AugmentConfig {
    std::size_t copies_per_row = 31;
    bool include_originals = true;
    std::uint64_t seed = 42;
};

// Population standard deviation (divide by N); needs >= 2 values.
double feature_std(std::span<const double> values);

// Per-feature sigma over the training rows of the raw-unit matrix.
std::vector<double> feature_stds(const ProcessedDataset& ds);

// Grows the dataset by adding, per training row, copies with cell noise drawn
// from Uniform[0, sigma_f] (never negative, never above sigma_f). Labels and
// split are inherited from the source row; test rows are never copied.
// Runs on the raw-unit matrix before scaling; the scaler is refit afterwards
// so the augmented range still maps inside [-1, 1]. Deterministic per seed
// and independent of scheduling (per-output-row rng substreams).
ProcessedDataset augment(const ProcessedDataset& ds, const AugmentConfig& config);

} // namespace fuelgan::augment

#endif
