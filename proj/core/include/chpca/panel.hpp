#pragma once

#include <chrono>
#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace chpca {

/// The five kinds of observed series per product.
enum class Variable { P, Q, Visit, TVAd, Search };

inline constexpr Variable kAllVariables[] = {Variable::P, Variable::Q, Variable::Visit,
                                             Variable::TVAd, Variable::Search};

std::string_view to_string(Variable v);
std::optional<Variable> parse_variable(std::string_view text);

struct SeriesLabel {
    std::string product;
    Variable variable = Variable::Q;

    std::string str() const;
    friend auto operator<=>(const SeriesLabel&, const SeriesLabel&) = default;
    friend bool operator==(const SeriesLabel&, const SeriesLabel&) = default;
};

using Day = std::chrono::sys_days;

/// Parses YYYY-MM-DD. Throws chpca::Error on anything else.
Day parse_iso_date(std::string_view text);
std::string format_iso_date(Day day);

/// Inclusive calendar window.
struct DayRange {
    Day first;
    Day last;

    std::size_t length() const;
    bool contains(Day d) const { return d >= first && d <= last; }
    std::size_t index_of(Day d) const;
    Day at(std::size_t i) const { return first + std::chrono::days(static_cast<int>(i)); }
};

/// N real series of common length T. Row order of `values` follows `labels`
/// and is the index contract for every downstream artifact.
struct PanelSeries {
    std::vector<SeriesLabel> labels;
    Eigen::MatrixXd values;  // N x T
    std::vector<Day> days;   // size T

    std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t length() const { return static_cast<std::size_t>(values.cols()); }
};

/// Indices of series with the given variable kind, in label order.
std::vector<std::size_t> indices_of(const std::vector<SeriesLabel>& labels, Variable v);

} // namespace chpca
