#ifndef FUELGAN_PIPELINE_HPP
#define FUELGAN_PIPELINE_HPP

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fuelgan/dataset.hpp"
#include "fuelgan/matrix.hpp"

namespace fuelgan::pipeline {

// One raw consumption log row. Numeric fields may be NaN ("missing") or
// invalid until clean() has run.
struct FuelRecord {
    std::string site_id;
    std::string visit_date;  // ISO date text; carried through, not computed on
    std::string power_type;
    double generator_capacity_kva = 0.0;
    double running_time_hours = 0.0;  // cumulative over the visit period
    double consumption_his = 0.0;     // liters over the period
    long long number_of_days = 0;
    double quantity_consumed_between_visits = 0.0;
    double total_quantity_left = 0.0;
    double maximum_consumption_per_day = 0.0;
    double consumption_rate = 0.0;  // liters/hour
};

// Input CSV columns, in canonical order. Header matching is case-, space-
// and punctuation-insensitive ("Running Time" == running_time).
inline const std::vector<std::string> kInputColumns = {
    "site_id",
    "visit_date",
    "power_type",
    "generator_capacity_kva",
    "running_time",
    "consumption_his",
    "number_of_days",
    "quantity_consumed_between_visits",
    "total_quantity_left",
    "maximum_consumption_per_day",
    "consumption_rate",
};

struct DerivedFeatures {
    double daily_consumption_within_period = 0.0;           // consumption_his / days
    double running_time_per_day = 0.0;                      // running_time / days
    double daily_consumed_quantity_between_visits = 0.0;    // qty between visits / days
};

// Feature-matrix column order: the eight numeric raw fields then the three
// derived ratios.
inline const std::vector<std::string> kFeatureNames = {
    "generator_capacity_kva",
    "running_time",
    "consumption_his",
    "number_of_days",
    "quantity_consumed_between_visits",
    "total_quantity_left",
    "maximum_consumption_per_day",
    "consumption_rate",
    "daily_consumption_within_period",
    "running_time_per_day",
    "daily_consumed_quantity_between_visits",
};

struct Rejection {
    std::size_t line = 0;  // 1-based line number in the source file
    std::string reason;
};

struct LoadResult {
    std::vector<FuelRecord> records;
    std::vector<Rejection> rejections;
};

// Parses the CSV at `path`. Rows failing type checks land in the rejection
// report with their line numbers; the batch never aborts on a bad row.
// Missing file -> IoError; missing mandatory column -> SchemaError.
LoadResult load_csv(const std::string& path);

void write_rejection_report(const std::string& path, const std::vector<Rejection>& rejections,
                            const std::string& config_fingerprint);

struct CleanResult {
    std::vector<FuelRecord> records;
    std::map<std::string, std::size_t> drop_tally;  // reason -> count
};

// Drops rows with missing values, zero/negative-day periods, or negative
// quantities; tallies the reasons.
CleanResult clean(const std::vector<FuelRecord>& records);

// Requires number_of_days >= 1 (run clean() first) -> DomainError otherwise.
DerivedFeatures derive_features(const FuelRecord& record);

struct LabelRuleSet {
    double running_time_threshold_hours = 24.0;  // rule R1 threshold, strict >
    bool rule_running_time = true;               // R1: running_time_per_day > threshold
    bool rule_daily_exceeds_max = true;          // R2: daily consumed > max per day
};

void validate(const LabelRuleSet& rules);

// 1 (anomalous) iff any enabled rule fires; inequalities are strict.
int label(const FuelRecord& record, const DerivedFeatures& features, const LabelRuleSet& rules);

// Assembles the feature matrix, derived columns, labels and dates. Split and
// scaler are left unset; call split_dataset then scale_fit.
ProcessedDataset build_dataset(const std::vector<FuelRecord>& records,
                               const LabelRuleSet& rules);

// Stratified split: per class, round(count * test_fraction) rows go to test,
// deterministic per seed. A present class with < 2 rows is an error.
void split_dataset(ProcessedDataset& ds, double test_fraction, std::uint64_t seed);

// Min-max scaler fitted on the training split only.
void scale_fit(ProcessedDataset& ds);

struct CorrelationResult {
    Matrix matrix;  // Pearson, symmetric, unit diagonal
    std::vector<std::string> warnings;
};

// Needs >= 2 rows. Constant features correlate 0 with everything (with a
// warning); the diagonal is exactly 1.
CorrelationResult correlation_matrix(const Matrix& features);

void write_correlation_csv(const std::string& path, const std::vector<std::string>& names,
                           const Matrix& corr, const std::string& config_fingerprint);

enum class PlotKind { ScatterRunningTime, TimeSeriesRunningTime };

PlotKind plot_kind_from_name(const std::string& name);

// (index-or-date, running_time_per_day, label, reference_hours) rows for
// external plotting; the reference column is the rule threshold.
void export_plot_data(const std::string& path, const ProcessedDataset& ds, PlotKind kind,
                      const LabelRuleSet& rules, const std::string& config_fingerprint);

} // namespace fuelgan::pipeline

#endif
