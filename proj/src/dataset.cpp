#include "fuelgan/dataset.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "fuelgan/csv.hpp"
#include "fuelgan/errors.hpp"

namespace fuelgan {

using nlohmann::json;

Scaler fit_scaler(const Matrix& features, const std::vector<int>& split) {
    if (split.size() != features.rows()) {
        throw DimensionError("fit_scaler: split size " + std::to_string(split.size()) +
                             " vs rows " + std::to_string(features.rows()));
    }
    Scaler scaler;
    scaler.min.assign(features.cols(), 0.0);
    scaler.max.assign(features.cols(), 0.0);
    bool any_train = false;
    for (std::size_t i = 0; i < features.rows(); ++i) {
        if (split[i] != kSplitTrain) continue;
        if (!any_train) {
            for (std::size_t j = 0; j < features.cols(); ++j) {
                scaler.min[j] = scaler.max[j] = features(i, j);
            }
            any_train = true;
            continue;
        }
        for (std::size_t j = 0; j < features.cols(); ++j) {
            scaler.min[j] = std::min(scaler.min[j], features(i, j));
            scaler.max[j] = std::max(scaler.max[j], features(i, j));
        }
    }
    if (!any_train) throw ArgumentError("fit_scaler: no training rows");
    return scaler;
}

Matrix scaler_transform(const Scaler& scaler, const Matrix& features) {
    if (!scaler.fitted()) throw StateError("scaler_transform: scaler not fitted");
    if (scaler.min.size() != features.cols()) {
        throw DimensionError("scaler_transform: scaler has " +
                             std::to_string(scaler.min.size()) + " features, matrix " +
                             features.shape_str());
    }
    Matrix out(features.rows(), features.cols());
    for (std::size_t j = 0; j < features.cols(); ++j) {
        const double lo = scaler.min[j];
        const double hi = scaler.max[j];
        const double range = hi - lo;
        for (std::size_t i = 0; i < features.rows(); ++i) {
            if (range == 0.0) {
                out(i, j) = 0.0;
            } else {
                out(i, j) = std::clamp(-1.0 + 2.0 * (features(i, j) - lo) / range, -1.0, 1.0);
            }
        }
    }
    return out;
}

Matrix scaler_inverse(const Scaler& scaler, const Matrix& scaled) {
    if (!scaler.fitted()) throw StateError("scaler_inverse: scaler not fitted");
    if (scaler.min.size() != scaled.cols()) {
        throw DimensionError("scaler_inverse: scaler has " + std::to_string(scaler.min.size()) +
                             " features, matrix " + scaled.shape_str());
    }
    Matrix out(scaled.rows(), scaled.cols());
    for (std::size_t j = 0; j < scaled.cols(); ++j) {
        const double lo = scaler.min[j];
        const double hi = scaler.max[j];
        for (std::size_t i = 0; i < scaled.rows(); ++i) {
            out(i, j) = lo + (scaled(i, j) + 1.0) * 0.5 * (hi - lo);
        }
    }
    return out;
}

std::size_t ProcessedDataset::feature_index(const std::string& name) const {
    for (std::size_t j = 0; j < feature_names.size(); ++j) {
        if (feature_names[j] == name) return j;
    }
    throw ArgumentError("unknown feature: " + name);
}

Matrix rows_subset(const Matrix& features, const std::vector<std::size_t>& indices) {
    Matrix out(indices.size(), features.cols());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        for (std::size_t j = 0; j < features.cols(); ++j) out(i, j) = features(indices[i], j);
    }
    return out;
}

std::vector<std::size_t> train_indices(const ProcessedDataset& ds) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < ds.split.size(); ++i) {
        if (ds.split[i] == kSplitTrain) idx.push_back(i);
    }
    return idx;
}

std::vector<std::size_t> test_indices(const ProcessedDataset& ds) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < ds.split.size(); ++i) {
        if (ds.split[i] == kSplitTest) idx.push_back(i);
    }
    return idx;
}

void save_dataset(const std::string& path, const ProcessedDataset& ds) {
    json j;
    j["format"] = "fuelgan.dataset/1";
    j["config_fingerprint"] = ds.config_fingerprint;
    j["rules_fingerprint"] = ds.rules_fingerprint;
    j["feature_names"] = ds.feature_names;
    j["rows"] = ds.rows();
    j["matrix"] = std::vector<double>(ds.features.values().begin(), ds.features.values().end());
    j["labels"] = ds.labels;
    j["split"] = ds.split;
    j["dates"] = ds.dates;
    if (!ds.source_rows.empty()) j["source_rows"] = ds.source_rows;
    if (ds.scaler.fitted()) {
        j["scaler"] = {{"min", ds.scaler.min}, {"max", ds.scaler.max}};
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed for " + path);
}

ProcessedDataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw SchemaError(path + ": invalid dataset JSON: " + e.what());
    }
    if (j.value("format", "") != "fuelgan.dataset/1") {
        throw SchemaError(path + ": not a fuelgan dataset file");
    }

    ProcessedDataset ds;
    ds.config_fingerprint = j.value("config_fingerprint", "");
    ds.rules_fingerprint = j.value("rules_fingerprint", "");
    ds.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    const auto rows = j.at("rows").get<std::size_t>();
    const auto flat = j.at("matrix").get<std::vector<double>>();
    const std::size_t cols = ds.feature_names.size();
    if (flat.size() != rows * cols) {
        throw SchemaError(path + ": matrix size " + std::to_string(flat.size()) +
                          " does not match " + std::to_string(rows) + "x" +
                          std::to_string(cols));
    }
    ds.features = Matrix(rows, cols);
    std::copy(flat.begin(), flat.end(), ds.features.values().begin());
    ds.labels = j.at("labels").get<std::vector<int>>();
    ds.split = j.at("split").get<std::vector<int>>();
    ds.dates = j.value("dates", std::vector<std::string>{});
    ds.source_rows = j.value("source_rows", std::vector<long long>{});
    if (j.contains("scaler")) {
        ds.scaler.min = j["scaler"].at("min").get<std::vector<double>>();
        ds.scaler.max = j["scaler"].at("max").get<std::vector<double>>();
    }
    if (ds.labels.size() != rows || ds.split.size() != rows) {
        throw SchemaError(path + ": labels/split length does not match row count");
    }
    return ds;
}

void export_dataset_csv(const std::string& path, const ProcessedDataset& ds) {
    std::string header;
    for (const std::string& name : ds.feature_names) header += name + ",";
    header += "label,split,source_row";
    std::vector<std::string> lines;
    lines.reserve(ds.rows());
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        std::string line;
        for (std::size_t j = 0; j < ds.feature_count(); ++j) {
            line += csv::format_double(ds.features(i, j)) + ",";
        }
        line += std::to_string(ds.labels[i]) + ",";
        line += ds.split[i] == kSplitTrain ? "train," : "test,";
        line += std::to_string(ds.source_rows.empty() ? static_cast<long long>(i)
                                                      : ds.source_rows[i]);
        lines.push_back(std::move(line));
    }
    csv::write_file(path, {"config_fingerprint=" + ds.config_fingerprint}, header, lines);
}

} // namespace fuelgan
