#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "chpca/panel.hpp"

namespace chpca {

/// One raw observation. P rows carry a unit price; all other kinds carry a
/// nonnegative count or quantity.
struct RawEvent {
    std::string customer_id;
    std::string product;
    std::string sku;
    Variable variable = Variable::Q;
    Day date;
    double value = 0.0;
};

struct RawEventTable {
    std::vector<RawEvent> rows;
};

/// Column names of the event file. Every name must be present in the header.
struct EventSchema {
    std::string customer = "customer_id";
    std::string product = "product_code";
    std::string sku = "sku_code";
    std::string variable = "variable";
    std::string date = "date";
    std::string value = "value";
    char delimiter = ',';
};

struct LoadResult {
    RawEventTable table;
    std::size_t dropped = 0;  // rows outside the window
};

/// Reads an event file, keeping rows inside `window`. Throws ParseError with
/// the offending line number on a bad date, bad number, negative value,
/// nonpositive price or unknown variable.
LoadResult load_events(const std::filesystem::path& path, const EventSchema& schema, const DayRange& window);

/// Per-series count of days with a nonzero entry. For P this is the number
/// of days on which a price was observed.
using EntryDayCount = std::map<SeriesLabel, std::size_t>;

struct AggregateResult {
    PanelSeries panel;  // unstandardized; products sorted, variables in enum order
    EntryDayCount counts;
};

/// Sums Q/Visit/TVAd/Search per (product, variable, day) over customers and
/// SKUs; P is the quantity-weighted mean unit price of the day's purchases,
/// forward-filled over days without purchases and back-filled before the
/// first one. Products are sorted; each contributes all five variables.
AggregateResult aggregate(const RawEventTable& raw, const DayRange& window);

enum class PriceFill {
    CarryForward,  // gaps take the last observed price; leading gap takes the first
    Zero,          // days without purchases stay 0
};

/// Aggregates `events` into the rows named by `labels` over `window`.
/// `events` may be any subset of a table (e.g. one customer's rows).
Eigen::MatrixXd aggregate_series(const std::vector<const RawEvent*>& events,
                                 const std::vector<SeriesLabel>& labels, const DayRange& window,
                                 PriceFill fill);

/// Keeps series whose entry-day count is at least `min_days`, in order.
PanelSeries filter_sparse(const PanelSeries& panel, const EntryDayCount& counts, std::size_t min_days);

/// Per-row mean 0 and population standard deviation 1.
PanelSeries standardize(const PanelSeries& panel);

struct RankSizeOptions {
    double min_total = 0.0;       // products at or below this total are ignored
    std::size_t first_rank = 1;   // fit starts at this rank (1 = include the top product)
};

struct RankSizeFit {
    double exponent = 0.0;   // slope of log(rank) against log(total)
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t points = 0;
};

/// OLS of log(rank) on log(total quantity); ranks follow descending totals.
RankSizeFit ranksize_fit(const std::vector<double>& totals, const RankSizeOptions& options = {});

} // namespace chpca
