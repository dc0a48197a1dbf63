#ifndef FUELGAN_CSV_HPP
#define FUELGAN_CSV_HPP

#include <optional>
#include <string>
#include <vector>

namespace fuelgan::csv {

// Dialect used throughout: comma separated, UTF-8, '.' decimal separator,
// mandatory header row. Lines starting with '#' are metadata comments
// (artifacts use one to embed the config fingerprint) and are skipped on read.

std::vector<std::string> split_line(const std::string& line);

// Doubles formatted with %.10g so at least 6 significant digits survive and
// output bytes are stable across runs.
std::string format_double(double v);

std::optional<double> parse_double(const std::string& field);
std::optional<long long> parse_int(const std::string& field);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    // 1-based file line number per data row (comments/header shift them).
    std::vector<std::size_t> line_numbers;
    std::vector<std::string> comments;
};

// Throws IoError when the file cannot be opened.
Table read_file(const std::string& path);

void write_file(const std::string& path, const std::vector<std::string>& comments,
                const std::string& header, const std::vector<std::string>& rows);

// Lowercase alphanumerics only: "Running Time (h)" -> "runningtimeh".
std::string normalize_column_name(const std::string& name);

} // namespace fuelgan::csv

#endif
