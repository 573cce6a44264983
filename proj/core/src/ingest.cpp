#include "chpca/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <tuple>

#include "chpca/error.hpp"
#include "chpca/io.hpp"

namespace chpca {

LoadResult load_events(const std::filesystem::path& path, const EventSchema& schema, const DayRange& window) {
    if (!std::filesystem::exists(path)) throw Error("input file not found: '" + path.string() + "'");
    const DelimitedTable table = read_delimited(path, schema.delimiter);
    const std::size_t c_customer = table.column(schema.customer);
    const std::size_t c_product = table.column(schema.product);
    const std::size_t c_sku = table.column(schema.sku);
    const std::size_t c_variable = table.column(schema.variable);
    const std::size_t c_date = table.column(schema.date);
    const std::size_t c_value = table.column(schema.value);

    LoadResult result;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const std::size_t line = table.line_numbers[i];
        RawEvent ev;
        ev.customer_id = row[c_customer];
        ev.product = row[c_product];
        ev.sku = row[c_sku];
        auto v = parse_variable(row[c_variable]);
        if (!v) throw ParseError(line, "unknown variable '" + row[c_variable] + "'");
        ev.variable = *v;
        try {
            ev.date = parse_iso_date(row[c_date]);
            ev.value = parse_double(row[c_value]);
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(line, e.what());
        }
        if (!std::isfinite(ev.value)) throw ParseError(line, "non-finite value");
        if (ev.value < 0.0) throw ParseError(line, "negative value for " + std::string(to_string(ev.variable)));
        if (ev.variable == Variable::P && ev.value <= 0.0) throw ParseError(line, "price must be positive");
        if (ev.product.empty()) throw ParseError(line, "empty product code");
        if (!window.contains(ev.date)) {
            ++result.dropped;
            continue;
        }
        result.table.rows.push_back(std::move(ev));
    }
    return result;
}

Eigen::MatrixXd aggregate_series(const std::vector<const RawEvent*>& events,
                                 const std::vector<SeriesLabel>& labels, const DayRange& window,
                                 PriceFill fill) {
    const std::size_t T = window.length();
    const auto N = static_cast<Eigen::Index>(labels.size());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(N, static_cast<Eigen::Index>(T));

    std::map<SeriesLabel, Eigen::Index> row_of;
    for (Eigen::Index i = 0; i < N; ++i) row_of.emplace(labels[static_cast<std::size_t>(i)], i);

    // A purchase is keyed by (customer, sku, day); its price is the mean of
    // its P rows and its weight the sum of its Q rows.
    struct Purchase {
        double price_sum = 0.0;
        std::size_t price_rows = 0;
        double quantity = 0.0;
    };
    using PurchaseKey = std::tuple<std::string, std::string, std::string, std::size_t>;
    std::map<PurchaseKey, Purchase> purchases;

    for (const RawEvent* ev : events) {
        if (!window.contains(ev->date)) continue;
        const std::size_t t = window.index_of(ev->date);
        if (ev->variable == Variable::P || ev->variable == Variable::Q) {
            auto& p = purchases[{ev->product, ev->customer_id, ev->sku, t}];
            if (ev->variable == Variable::P) {
                p.price_sum += ev->value;
                ++p.price_rows;
            } else {
                p.quantity += ev->value;
            }
        }
        if (ev->variable == Variable::P) continue;
        auto it = row_of.find({ev->product, ev->variable});
        if (it != row_of.end()) out(it->second, static_cast<Eigen::Index>(t)) += ev->value;
    }

    // Weighted price per (product, day). Days whose purchases carry no
    // quantity fall back to the plain mean of the observed prices.
    struct DayPrice {
        double weighted = 0.0;
        double weight = 0.0;
        double plain = 0.0;
        std::size_t count = 0;
    };
    std::map<std::pair<std::string, std::size_t>, DayPrice> day_price;
    for (const auto& [key, p] : purchases) {
        if (p.price_rows == 0) continue;
        const double price = p.price_sum / static_cast<double>(p.price_rows);
        auto& d = day_price[{std::get<0>(key), std::get<3>(key)}];
        d.weighted += price * p.quantity;
        d.weight += p.quantity;
        d.plain += price;
        ++d.count;
    }

    for (Eigen::Index i = 0; i < N; ++i) {
        const auto& label = labels[static_cast<std::size_t>(i)];
        if (label.variable != Variable::P) continue;
        std::vector<std::optional<double>> observed(T);
        for (std::size_t t = 0; t < T; ++t) {
            auto it = day_price.find({label.product, t});
            if (it == day_price.end()) continue;
            const DayPrice& d = it->second;
            observed[t] = d.weight > 0.0 ? d.weighted / d.weight : d.plain / static_cast<double>(d.count);
        }
        if (fill == PriceFill::Zero) {
            for (std::size_t t = 0; t < T; ++t) out(i, static_cast<Eigen::Index>(t)) = observed[t].value_or(0.0);
            continue;
        }
        auto first = std::find_if(observed.begin(), observed.end(), [](const auto& o) { return o.has_value(); });
        if (first == observed.end()) continue;
        double last = **first;
        for (std::size_t t = 0; t < T; ++t) {
            if (observed[t]) last = *observed[t];
            out(i, static_cast<Eigen::Index>(t)) = last;
        }
    }
    return out;
}

AggregateResult aggregate(const RawEventTable& raw, const DayRange& window) {
    if (window.length() < 2) throw Error("analysis window must span at least 2 days");
    std::vector<const RawEvent*> events;
    std::set<std::string> products;
    for (const auto& ev : raw.rows) {
        if (!window.contains(ev.date)) continue;
        events.push_back(&ev);
        products.insert(ev.product);
    }
    if (events.empty()) throw Error("no data in window");

    AggregateResult result;
    for (const auto& product : products) {
        for (Variable v : kAllVariables) result.panel.labels.push_back({product, v});
    }
    const std::size_t T = window.length();
    for (std::size_t t = 0; t < T; ++t) result.panel.days.push_back(window.at(t));
    result.panel.values = aggregate_series(events, result.panel.labels, window, PriceFill::CarryForward);

    // Entry days: nonzero totals, except P where a day counts when a price
    // was observed (the filled series is nonzero everywhere).
    std::map<std::string, std::set<std::size_t>> price_days;
    for (const RawEvent* ev : events) {
        if (ev->variable == Variable::P) price_days[ev->product].insert(window.index_of(ev->date));
    }
    for (std::size_t i = 0; i < result.panel.labels.size(); ++i) {
        const auto& label = result.panel.labels[i];
        std::size_t count = 0;
        if (label.variable == Variable::P) {
            count = price_days[label.product].size();
        } else {
            const auto row = result.panel.values.row(static_cast<Eigen::Index>(i));
            count = static_cast<std::size_t>((row.array() != 0.0).count());
        }
        result.counts[label] = count;
    }
    return result;
}

PanelSeries filter_sparse(const PanelSeries& panel, const EntryDayCount& counts, std::size_t min_days) {
    if (min_days < 1) throw Error("min_days must be at least 1");
    std::vector<Eigen::Index> keep;
    for (std::size_t i = 0; i < panel.labels.size(); ++i) {
        auto it = counts.find(panel.labels[i]);
        const std::size_t c = it == counts.end() ? 0 : it->second;
        if (c >= min_days) keep.push_back(static_cast<Eigen::Index>(i));
    }
    if (keep.empty()) throw Error("empty panel after filtering (min_days=" + std::to_string(min_days) + ")");
    PanelSeries out;
    out.days = panel.days;
    out.values.resize(static_cast<Eigen::Index>(keep.size()), panel.values.cols());
    for (std::size_t k = 0; k < keep.size(); ++k) {
        out.labels.push_back(panel.labels[static_cast<std::size_t>(keep[k])]);
        out.values.row(static_cast<Eigen::Index>(k)) = panel.values.row(keep[k]);
    }
    return out;
}

PanelSeries standardize(const PanelSeries& panel) {
    PanelSeries out = panel;
    const double T = static_cast<double>(panel.values.cols());
    for (Eigen::Index i = 0; i < out.values.rows(); ++i) {
        auto row = out.values.row(i);
        const double mean = row.mean();
        row.array() -= mean;
        const double sd = std::sqrt(row.squaredNorm() / T);
        const double scale = std::max(std::abs(mean), row.cwiseAbs().maxCoeff());
        if (!(sd > 1e-14 * std::max(scale, 1e-300)) || !std::isfinite(sd)) {
            const std::string name = static_cast<std::size_t>(i) < panel.labels.size()
                                         ? panel.labels[static_cast<std::size_t>(i)].str()
                                         : "row " + std::to_string(i);
            throw Error("cannot standardize constant series " + name);
        }
        row /= sd;
    }
    return out;
}

RankSizeFit ranksize_fit(const std::vector<double>& totals, const RankSizeOptions& options) {
    std::vector<double> sorted;
    for (double t : totals) {
        if (t > 0.0 && std::isfinite(t)) sorted.push_back(t);
    }
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    std::vector<double> xs, ys;
    for (std::size_t r = 0; r < sorted.size(); ++r) {
        const std::size_t rank = r + 1;
        if (rank < options.first_rank || sorted[r] <= options.min_total) continue;
        xs.push_back(std::log(sorted[r]));
        ys.push_back(std::log(static_cast<double>(rank)));
    }
    if (xs.size() < 3) throw Error("rank-size fit needs at least 3 products above the cutoff");
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx <= 1e-12 * n) throw Error("rank-size fit is degenerate: totals do not vary");
    RankSizeFit fit;
    fit.exponent = sxy / sxx;
    fit.intercept = my - fit.exponent * mx;
    fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    fit.points = xs.size();
    return fit;
}

} // namespace chpca
