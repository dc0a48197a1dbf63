#include "fuelgan/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "fuelgan/csv.hpp"
#include "fuelgan/errors.hpp"
#include "fuelgan/rng.hpp"

namespace fuelgan::pipeline {

namespace {

bool is_missing(double v) { return !std::isfinite(v); }

struct ColumnIndex {
    std::size_t site_id, visit_date, power_type;
    std::size_t capacity, running_time, consumption_his, days;
    std::size_t qty_between, qty_left, max_per_day, rate;
};

ColumnIndex resolve_columns(const std::vector<std::string>& header, const std::string& path) {
    std::vector<std::size_t> indices(kInputColumns.size());
    std::vector<std::string> missing;
    for (std::size_t c = 0; c < kInputColumns.size(); ++c) {
        const std::string want = csv::normalize_column_name(kInputColumns[c]);
        bool found = false;
        for (std::size_t h = 0; h < header.size(); ++h) {
            if (csv::normalize_column_name(header[h]) == want) {
                indices[c] = h;
                found = true;
                break;
            }
        }
        if (!found) missing.push_back(kInputColumns[c]);
    }
    if (!missing.empty()) {
        std::string list;
        for (const std::string& m : missing) list += (list.empty() ? "" : ", ") + m;
        throw SchemaError(path + ": missing mandatory column(s): " + list);
    }
    return ColumnIndex{indices[0], indices[1], indices[2], indices[3], indices[4], indices[5],
                       indices[6], indices[7], indices[8], indices[9], indices[10]};
}

} // namespace

LoadResult load_csv(const std::string& path) {
    const csv::Table table = csv::read_file(path);
    const ColumnIndex col = resolve_columns(table.header, path);

    LoadResult result;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& fields = table.rows[r];
        const std::size_t line = table.line_numbers[r];
        if (fields.size() != table.header.size()) {
            result.rejections.push_back({line, "wrong field count"});
            continue;
        }

        FuelRecord rec;
        rec.site_id = fields[col.site_id];
        rec.visit_date = fields[col.visit_date];
        rec.power_type = fields[col.power_type];

        std::string reason;
        auto numeric = [&](std::size_t idx, const std::string& name) -> double {
            if (!reason.empty()) return 0.0;
            const auto v = csv::parse_double(fields[idx]);
            if (!v) {
                reason = fields[idx].empty() ? "missing value: " + name
                                             : "invalid number: " + name;
                return 0.0;
            }
            return *v;
        };

        rec.generator_capacity_kva = numeric(col.capacity, "generator_capacity_kva");
        rec.running_time_hours = numeric(col.running_time, "running_time");
        rec.consumption_his = numeric(col.consumption_his, "consumption_his");
        rec.quantity_consumed_between_visits =
            numeric(col.qty_between, "quantity_consumed_between_visits");
        rec.total_quantity_left = numeric(col.qty_left, "total_quantity_left");
        rec.maximum_consumption_per_day = numeric(col.max_per_day, "maximum_consumption_per_day");
        rec.consumption_rate = numeric(col.rate, "consumption_rate");
        if (reason.empty()) {
            const auto days = csv::parse_int(fields[col.days]);
            if (!days) {
                reason = fields[col.days].empty() ? "missing value: number_of_days"
                                                  : "invalid number: number_of_days";
            } else {
                rec.number_of_days = *days;
            }
        }
        if (reason.empty() && rec.site_id.empty()) reason = "missing value: site_id";
        if (reason.empty() && rec.visit_date.empty()) reason = "missing value: visit_date";

        if (!reason.empty()) {
            result.rejections.push_back({line, reason});
        } else {
            result.records.push_back(std::move(rec));
        }
    }
    return result;
}

void write_rejection_report(const std::string& path, const std::vector<Rejection>& rejections,
                            const std::string& config_fingerprint) {
    std::vector<std::string> lines;
    lines.reserve(rejections.size());
    for (const Rejection& r : rejections) {
        lines.push_back(std::to_string(r.line) + "," + r.reason);
    }
    csv::write_file(path, {"config_fingerprint=" + config_fingerprint}, "line,reason", lines);
}

CleanResult clean(const std::vector<FuelRecord>& records) {
    CleanResult result;
    for (const FuelRecord& rec : records) {
        if (is_missing(rec.generator_capacity_kva) || is_missing(rec.running_time_hours) ||
            is_missing(rec.consumption_his) || is_missing(rec.quantity_consumed_between_visits) ||
            is_missing(rec.total_quantity_left) || is_missing(rec.maximum_consumption_per_day) ||
            is_missing(rec.consumption_rate)) {
            ++result.drop_tally["missing value"];
            continue;
        }
        if (rec.number_of_days < 1) {
            ++result.drop_tally["zero-day period"];
            continue;
        }
        if (rec.running_time_hours < 0.0 || rec.consumption_his < 0.0 ||
            rec.quantity_consumed_between_visits < 0.0 || rec.total_quantity_left < 0.0 ||
            rec.maximum_consumption_per_day < 0.0 || rec.consumption_rate < 0.0 ||
            rec.generator_capacity_kva < 0.0) {
            ++result.drop_tally["negative quantity"];
            continue;
        }
        result.records.push_back(rec);
    }
    return result;
}

DerivedFeatures derive_features(const FuelRecord& record) {
    if (record.number_of_days < 1) {
        throw DomainError("derive_features: number_of_days must be >= 1 (clean first)");
    }
    const double days = static_cast<double>(record.number_of_days);
    DerivedFeatures f;
    f.daily_consumption_within_period = record.consumption_his / days;
    f.running_time_per_day = record.running_time_hours / days;
    f.daily_consumed_quantity_between_visits = record.quantity_consumed_between_visits / days;
    return f;
}

void validate(const LabelRuleSet& rules) {
    if (rules.running_time_threshold_hours <= 0.0) {
        throw ConfigError("label rules: threshold must be positive");
    }
    if (!rules.rule_running_time && !rules.rule_daily_exceeds_max) {
        throw ConfigError("label rules: at least one rule must be enabled");
    }
}

int label(const FuelRecord& record, const DerivedFeatures& features, const LabelRuleSet& rules) {
    validate(rules);
    bool anomalous = false;
    if (rules.rule_running_time &&
        features.running_time_per_day > rules.running_time_threshold_hours) {
        anomalous = true;
    }
    if (rules.rule_daily_exceeds_max &&
        features.daily_consumed_quantity_between_visits > record.maximum_consumption_per_day) {
        anomalous = true;
    }
    return anomalous ? kLabelAnomalous : kLabelNormal;
}

ProcessedDataset build_dataset(const std::vector<FuelRecord>& records,
                               const LabelRuleSet& rules) {
    validate(rules);
    ProcessedDataset ds;
    ds.feature_names = kFeatureNames;
    ds.features = Matrix(records.size(), kFeatureNames.size());
    ds.labels.resize(records.size());
    ds.split.assign(records.size(), kSplitTrain);
    ds.dates.resize(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const FuelRecord& r = records[i];
        const DerivedFeatures f = derive_features(r);
        ds.features(i, 0) = r.generator_capacity_kva;
        ds.features(i, 1) = r.running_time_hours;
        ds.features(i, 2) = r.consumption_his;
        ds.features(i, 3) = static_cast<double>(r.number_of_days);
        ds.features(i, 4) = r.quantity_consumed_between_visits;
        ds.features(i, 5) = r.total_quantity_left;
        ds.features(i, 6) = r.maximum_consumption_per_day;
        ds.features(i, 7) = r.consumption_rate;
        ds.features(i, 8) = f.daily_consumption_within_period;
        ds.features(i, 9) = f.running_time_per_day;
        ds.features(i, 10) = f.daily_consumed_quantity_between_visits;
        ds.labels[i] = label(r, f, rules);
        ds.dates[i] = r.visit_date;
    }
    return ds;
}

void split_dataset(ProcessedDataset& ds, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw ArgumentError("split: test fraction must be in (0, 1), got " +
                            std::to_string(test_fraction));
    }
    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < ds.labels.size(); ++i) {
        by_class[ds.labels[i] == kLabelAnomalous ? 1 : 0].push_back(i);
    }
    Rng rng(seed);
    ds.split.assign(ds.rows(), kSplitTrain);
    for (auto& indices : by_class) {
        if (indices.empty()) continue;
        if (indices.size() < 2) {
            throw ArgumentError("split: a class with " + std::to_string(indices.size()) +
                                " row(s) cannot be stratified");
        }
        // Fisher-Yates on the class indices, then the head goes to test.
        for (std::size_t i = indices.size(); i-- > 1;) {
            const std::size_t j = rng.next_below(i + 1);
            std::swap(indices[i], indices[j]);
        }
        const auto n_test = static_cast<std::size_t>(
            std::llround(static_cast<double>(indices.size()) * test_fraction));
        for (std::size_t i = 0; i < n_test && i < indices.size(); ++i) {
            ds.split[indices[i]] = kSplitTest;
        }
    }
}

void scale_fit(ProcessedDataset& ds) { ds.scaler = fit_scaler(ds.features, ds.split); }

CorrelationResult correlation_matrix(const Matrix& features) {
    if (features.rows() < 2) throw ArgumentError("correlation: need at least 2 rows");
    const std::size_t n = features.rows();
    const std::size_t p = features.cols();

    std::vector<double> mean(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += features(i, j);
        mean[j] = acc / static_cast<double>(n);
    }
    std::vector<double> sd(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = features(i, j) - mean[j];
            acc += d * d;
        }
        sd[j] = std::sqrt(acc);
    }

    CorrelationResult result;
    result.matrix = Matrix(p, p);
    for (std::size_t j = 0; j < p; ++j) {
        if (sd[j] == 0.0) {
            result.warnings.push_back("feature " + std::to_string(j) +
                                      " is constant; correlations reported as 0");
        }
    }
    for (std::size_t a = 0; a < p; ++a) {
        result.matrix(a, a) = 1.0;
        for (std::size_t b = a + 1; b < p; ++b) {
            double corr = 0.0;
            if (sd[a] != 0.0 && sd[b] != 0.0) {
                double cov = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    cov += (features(i, a) - mean[a]) * (features(i, b) - mean[b]);
                }
                corr = cov / (sd[a] * sd[b]);
            }
            result.matrix(a, b) = corr;
            result.matrix(b, a) = corr;
        }
    }
    return result;
}

void write_correlation_csv(const std::string& path, const std::vector<std::string>& names,
                           const Matrix& corr, const std::string& config_fingerprint) {
    if (names.size() != corr.rows()) {
        throw DimensionError("correlation csv: " + std::to_string(names.size()) +
                             " names vs matrix " + corr.shape_str());
    }
    std::string header = "feature";
    for (const std::string& name : names) header += "," + name;
    std::vector<std::string> lines;
    for (std::size_t i = 0; i < corr.rows(); ++i) {
        std::string line = names[i];
        for (std::size_t j = 0; j < corr.cols(); ++j) {
            line += "," + csv::format_double(corr(i, j));
        }
        lines.push_back(std::move(line));
    }
    csv::write_file(path, {"config_fingerprint=" + config_fingerprint}, header, lines);
}

PlotKind plot_kind_from_name(const std::string& name) {
    if (name == "scatter-running-time") return PlotKind::ScatterRunningTime;
    if (name == "time-series-running-time") return PlotKind::TimeSeriesRunningTime;
    throw ArgumentError("unknown plot kind: " + name);
}

void export_plot_data(const std::string& path, const ProcessedDataset& ds, PlotKind kind,
                      const LabelRuleSet& rules, const std::string& config_fingerprint) {
    const std::size_t rt_col = ds.feature_index("running_time_per_day");
    const bool by_date = kind == PlotKind::TimeSeriesRunningTime;
    if (by_date && ds.dates.size() != ds.rows()) {
        throw StateError("plot export: dataset has no dates");
    }
    std::string header = std::string(by_date ? "visit_date" : "index") +
                         ",running_time_per_day,label,reference_hours";
    const std::string ref = csv::format_double(rules.running_time_threshold_hours);
    std::vector<std::string> lines;
    lines.reserve(ds.rows());
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        std::string line = by_date ? ds.dates[i] : std::to_string(i);
        line += "," + csv::format_double(ds.features(i, rt_col));
        line += "," + std::to_string(ds.labels[i]);
        line += "," + ref;
        lines.push_back(std::move(line));
    }
    csv::write_file(path, {"config_fingerprint=" + config_fingerprint}, header, lines);
}

} // namespace fuelgan::pipeline
