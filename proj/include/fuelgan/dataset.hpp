#ifndef FUELGAN_DATASET_HPP
#define FUELGAN_DATASET_HPP

#include <string>
#include <vector>

#include "fuelgan/matrix.hpp"

namespace fuelgan {

constexpr int kSplitTrain = 0;
constexpr int kSplitTest = 1;

constexpr int kLabelNormal = 0;
constexpr int kLabelAnomalous = 1;

// Per-feature min/max mapping the raw units onto [-1, 1].
struct Scaler {
    std::vector<double> min;
    std::vector<double> max;

    bool fitted() const { return !min.empty(); }
};

// Fit on the training split only; test rows never influence the parameters.
Scaler fit_scaler(const Matrix& features, const std::vector<int>& split);

// Maps into [-1, 1]; values beyond the fitted range (possible for test rows)
// are clipped so downstream tanh-range preconditions hold. Constant features
// map to 0.
Matrix scaler_transform(const Scaler& scaler, const Matrix& features);

// Exact inverse on the fitted range (clipped values cannot be recovered).
Matrix scaler_inverse(const Scaler& scaler, const Matrix& scaled);

struct ProcessedDataset {
    std::vector<std::string> feature_names;
    Matrix features;                      // raw units
    std::vector<int> labels;              // 0 normal, 1 anomalous
    std::vector<int> split;               // 0 train, 1 test
    std::vector<std::string> dates;       // per-row visit date
    std::vector<long long> source_rows;   // provenance after augmentation; empty otherwise
    Scaler scaler;
    std::string rules_fingerprint;
    std::string config_fingerprint;

    std::size_t rows() const { return features.rows(); }
    std::size_t feature_count() const { return features.cols(); }
    std::size_t feature_index(const std::string& name) const;  // throws ArgumentError
};

Matrix rows_subset(const Matrix& features, const std::vector<std::size_t>& indices);
std::vector<std::size_t> train_indices(const ProcessedDataset& ds);
std::vector<std::size_t> test_indices(const ProcessedDataset& ds);

void save_dataset(const std::string& path, const ProcessedDataset& ds);
ProcessedDataset load_dataset(const std::string& path);

// Feature-matrix CSV (feature columns + label + split + source_row).
void export_dataset_csv(const std::string& path, const ProcessedDataset& ds);

} // namespace fuelgan

#endif
