#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "chpca/panel.hpp"

namespace chpca {

/// Parsed delimiter-separated file. `line_numbers[i]` is the 1-based source
/// line of `rows[i]`; the header is always line 1.
struct DelimitedTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;

    /// Column position by header name; throws chpca::Error when absent.
    std::size_t column(std::string_view name) const;
};

/// Splits one record. Double-quoted fields may contain the delimiter and
/// escaped quotes ("").
std::vector<std::string> split_record(std::string_view line, char delimiter);

DelimitedTable read_delimited(const std::filesystem::path& path, char delimiter = ',');

/// Shortest text that round-trips the double exactly (17 significant digits).
std::string format_double(double x);
double parse_double(std::string_view text);

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m, char delimiter = ',');
Eigen::MatrixXd read_matrix(const std::filesystem::path& path, char delimiter = ',');

/// Writes `<dir>/<stem>.real.csv` and `<dir>/<stem>.imag.csv`.
void write_complex_matrix(const std::filesystem::path& dir, const std::string& stem,
                          const Eigen::MatrixXcd& m);
Eigen::MatrixXcd read_complex_matrix(const std::filesystem::path& dir, const std::string& stem);

/// Standardized panel on disk:
///   <stem>.labels.csv  index,product,variable
///   <stem>.days.csv    index,date
///   <stem>.matrix.csv  N rows of T values, no header
void save_panel(const std::filesystem::path& dir, const std::string& stem, const PanelSeries& panel);
PanelSeries load_panel(const std::filesystem::path& dir, const std::string& stem);

/// Lower-case hex SHA-256 of the file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Writes text atomically enough for our purposes: truncates and throws on failure.
void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

} // namespace chpca
