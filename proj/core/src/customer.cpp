#include "chpca/customer.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <boost/math/distributions/students_t.hpp>
#include <Eigen/Dense>

#include "chpca/error.hpp"
#include "chpca/hilbert.hpp"
#include "chpca/io.hpp"
#include "chpca/parallel.hpp"

namespace chpca {

CustomerPanel customer_panel(const RawEventTable& raw, const std::vector<SeriesLabel>& labels,
                             const DayRange& window) {
    std::map<std::string, std::vector<const RawEvent*>> by_customer;
    for (const auto& ev : raw.rows) {
        if (window.contains(ev.date)) by_customer[ev.customer_id].push_back(&ev);
    }
    CustomerPanel panel;
    panel.labels = labels;
    for (const auto& [id, events] : by_customer) {
        panel.customers.push_back({id, aggregate_series(events, labels, window, PriceFill::Zero)});
    }
    return panel;
}

std::vector<ComplexCustomer> customer_complexify(const CustomerPanel& panel, unsigned threads) {
    std::vector<ComplexCustomer> out(panel.customers.size());
    parallel_for(panel.customers.size(), threads, [&](std::size_t p) {
        const CustomerSeries& c = panel.customers[p];
        ComplexCustomer& z = out[p];
        z.id = c.id;
        z.values.resize(c.values.rows(), c.values.cols());
        z.nonzero_days.resize(static_cast<std::size_t>(c.values.rows()));
        for (Eigen::Index a = 0; a < c.values.rows(); ++a) {
            const Eigen::VectorXd row = c.values.row(a).transpose();
            z.nonzero_days[static_cast<std::size_t>(a)] = static_cast<std::size_t>((row.array() != 0.0).count());
            try {
                z.values.row(a) = standardize_complex(complexify_series(row), ZeroSeries::MapToZero).transpose();
            } catch (const Error& e) {
                const std::string series = static_cast<std::size_t>(a) < panel.labels.size()
                                               ? panel.labels[static_cast<std::size_t>(a)].str()
                                               : std::to_string(a);
                throw Error("customer " + c.id + ", series " + series + ": " + e.what());
            }
        }
    });
    return out;
}

CustomerSpace project(std::span<const ComplexCustomer> customers, const EigenSystem& sys,
                      std::span<const std::size_t> modes, bool keep_signals) {
    const Eigen::Index N = sys.eigenvectors.rows();
    Eigen::MatrixXcd basis(N, static_cast<Eigen::Index>(modes.size()));
    for (std::size_t k = 0; k < modes.size(); ++k) {
        if (modes[k] >= static_cast<std::size_t>(sys.eigenvectors.cols()))
            throw Error("mode index " + std::to_string(modes[k] + 1) + " out of range");
        basis.col(static_cast<Eigen::Index>(k)) = sys.eigenvectors.col(static_cast<Eigen::Index>(modes[k]));
    }
    CustomerSpace space;
    space.modes.assign(modes.begin(), modes.end());
    space.coordinates.resize(static_cast<Eigen::Index>(modes.size()), static_cast<Eigen::Index>(customers.size()));
    for (std::size_t p = 0; p < customers.size(); ++p) {
        const auto& c = customers[p];
        if (c.values.rows() != N) throw Error("customer " + c.id + " does not match the eigenvector length");
        const Eigen::MatrixXcd a = basis.adjoint() * c.values;
        const double T = static_cast<double>(c.values.cols());
        space.coordinates.col(static_cast<Eigen::Index>(p)) = a.rowwise().squaredNorm() / T;
        space.ids.push_back(c.id);
        if (keep_signals) space.signals.push_back(a);
    }
    return space;
}

std::string format_coordinates(const CustomerSpace& space, char delimiter) {
    std::string out = "customer_id";
    for (std::size_t m : space.modes) {
        out.push_back(delimiter);
        out += "X" + std::to_string(m + 1);
    }
    out.push_back('\n');
    for (std::size_t p = 0; p < space.ids.size(); ++p) {
        out += space.ids[p];
        for (Eigen::Index k = 0; k < space.coordinates.rows(); ++k) {
            out.push_back(delimiter);
            out += format_double(space.coordinates(k, static_cast<Eigen::Index>(p)));
        }
        out.push_back('\n');
    }
    return out;
}

const std::vector<double>& ProfileTable::column(const std::string& name) const {
    auto it = columns.find(name);
    if (it == columns.end()) throw Error("profile column '" + name + "' not found");
    return it->second;
}

const std::map<std::string, ColumnRange>& profile_ranges() {
    static const std::map<std::string, ColumnRange> ranges{
        {"age", {1, 9}},
        {"gender", {0, 1}},
        {"marital", {0, 1}},
        {"personal_income", {1, 9}},
        {"household_income", {1, 5}},
    };
    return ranges;
}

ProfileTable load_profiles(const std::filesystem::path& path, char delimiter) {
    const DelimitedTable table = read_delimited(path, delimiter);
    const std::size_t id_col = table.column("customer_id");
    ProfileTable profiles;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (c != id_col) profiles.columns[table.header[c]];
    }
    const auto& ranges = profile_ranges();
    std::set<std::string> seen;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::size_t line = table.line_numbers[r];
        if (!seen.insert(row[id_col]).second) throw ParseError(line, "duplicate customer_id '" + row[id_col] + "'");
        profiles.ids.push_back(row[id_col]);
        for (std::size_t c = 0; c < table.header.size(); ++c) {
            if (c == id_col) continue;
            const std::string& name = table.header[c];
            double v = std::nan("");
            if (!row[c].empty() && row[c] != "NA") {
                try {
                    v = parse_double(row[c]);
                } catch (const Error& e) {
                    throw ParseError(line, e.what());
                }
                auto range = ranges.find(name);
                if (range != ranges.end() && (v < range->second.lo || v > range->second.hi)) {
                    throw ParseError(line, name + " value " + row[c] + " outside [" + format_double(range->second.lo) +
                                               ", " + format_double(range->second.hi) + "]");
                }
            }
            profiles.columns[name].push_back(v);
        }
    }
    return profiles;
}

void add_purchase_covariates(ProfileTable& profiles, const RawEventTable& raw,
                             const std::vector<std::string>& products) {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < profiles.ids.size(); ++i) index[profiles.ids[i]] = i;
    const std::size_t P = profiles.ids.size();
    std::vector<double> frequency(P, 0.0), total(P, 0.0);
    std::map<std::string, std::vector<double>> per_product;
    for (const auto& product : products) per_product[product].assign(P, 0.0);
    for (const auto& ev : raw.rows) {
        if (ev.variable != Variable::Q || ev.value <= 0.0) continue;
        auto it = index.find(ev.customer_id);
        if (it == index.end()) continue;
        frequency[it->second] += 1.0;
        total[it->second] += ev.value;
        auto pp = per_product.find(ev.product);
        if (pp != per_product.end()) pp->second[it->second] += ev.value;
    }
    profiles.columns["total_frequency"] = std::move(frequency);
    profiles.columns["total_quantity"] = std::move(total);
    for (auto& [product, values] : per_product) profiles.columns["qty_" + product] = std::move(values);
}

namespace {

const std::vector<std::string> kDemographics{"age", "gender", "marital", "personal_income", "household_income"};

} // namespace

ModelSpec total_quantity_model(std::string name) {
    ModelSpec spec{std::move(name), kDemographics, true};
    spec.predictors.push_back("total_frequency");
    spec.predictors.push_back("total_quantity");
    return spec;
}

ModelSpec per_product_model(std::string name, const std::vector<std::string>& products) {
    ModelSpec spec{std::move(name), kDemographics, true};
    spec.predictors.push_back("total_frequency");
    for (const auto& p : products) spec.predictors.push_back("qty_" + p);
    return spec;
}

std::string significance_stars(double p) {
    if (p < 0.001) return "aa";
    if (p < 0.01) return "a";
    if (p < 0.05) return "b";
    if (p < 0.10) return "c";
    return "";
}

RegressionResult ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& design, const std::vector<std::string>& names) {
    const Eigen::Index n = y.size();
    const Eigen::Index k = design.cols() + 1;
    if (design.rows() != n) throw Error("design rows do not match the criterion length");
    if (names.size() != static_cast<std::size_t>(design.cols())) throw Error("one name per design column required");
    if (n <= k) throw Error("regression needs more observations than parameters");

    Eigen::MatrixXd X(n, k);
    X.col(0).setOnes();
    X.rightCols(k - 1) = design;
    std::vector<std::string> all_names{"Intercept"};
    all_names.insert(all_names.end(), names.begin(), names.end());

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() < k) {
        std::string msg = "rank-deficient design; collinear columns:";
        for (Eigen::Index i = qr.rank(); i < k; ++i) msg += " " + all_names[static_cast<std::size_t>(qr.colsPermutation().indices()(i))];
        throw Error(msg);
    }
    const Eigen::VectorXd beta = qr.solve(y);
    const Eigen::VectorXd resid = y - X * beta;
    const double rss = resid.squaredNorm();
    const double tss = (y.array() - y.mean()).matrix().squaredNorm();
    const auto dof = static_cast<double>(n - k);
    const double sigma2 = rss / dof;
    const Eigen::MatrixXd xtx_inv = (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(k, k));

    boost::math::students_t dist(dof);
    RegressionResult result;
    result.observations = static_cast<std::size_t>(n);
    for (Eigen::Index j = 0; j < k; ++j) {
        Coefficient c;
        c.name = all_names[static_cast<std::size_t>(j)];
        c.estimate = beta(j);
        c.std_error = std::sqrt(std::max(0.0, sigma2 * xtx_inv(j, j)));
        c.t_value = c.std_error > 0.0 ? c.estimate / c.std_error : 0.0;
        c.p_value = c.std_error > 0.0 ? 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(c.t_value))) : 1.0;
        c.stars = significance_stars(c.p_value);
        result.coefficients.push_back(c);
    }
    result.r2 = tss > 0.0 ? 1.0 - rss / tss : 0.0;
    result.adj_r2 = 1.0 - (1.0 - result.r2) * static_cast<double>(n - 1) / dof;
    return result;
}

RegressionResult regress(const CustomerSpace& space, std::size_t mode, const ProfileTable& profiles,
                         const ModelSpec& spec) {
    auto mode_it = std::find(space.modes.begin(), space.modes.end(), mode);
    if (mode_it == space.modes.end()) throw Error("mode " + std::to_string(mode + 1) + " not in customer space");
    const auto row = static_cast<Eigen::Index>(mode_it - space.modes.begin());

    std::map<std::string, std::size_t> profile_index;
    for (std::size_t i = 0; i < profiles.ids.size(); ++i) profile_index[profiles.ids[i]] = i;
    std::vector<const std::vector<double>*> cols;
    for (const auto& name : spec.predictors) cols.push_back(&profiles.column(name));

    std::vector<double> ys;
    std::vector<std::vector<double>> xs;
    std::size_t dropped = 0;
    for (std::size_t p = 0; p < space.ids.size(); ++p) {
        auto it = profile_index.find(space.ids[p]);
        if (it == profile_index.end()) {
            ++dropped;
            continue;
        }
        std::vector<double> x;
        bool missing = false;
        for (const auto* col : cols) {
            const double v = (*col)[it->second];
            missing = missing || std::isnan(v);
            x.push_back(v);
        }
        const double y = space.coordinates(row, static_cast<Eigen::Index>(p));
        if (missing || !std::isfinite(y)) {
            ++dropped;
            continue;
        }
        ys.push_back(y);
        xs.push_back(std::move(x));
    }
    const auto n = static_cast<Eigen::Index>(ys.size());
    const auto k = static_cast<Eigen::Index>(spec.predictors.size());
    Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(ys.data(), n);
    Eigen::MatrixXd design(n, k);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < k; ++j) design(i, j) = xs[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];

    std::vector<std::string> constant;
    for (Eigen::Index j = 0; j < k; ++j) {
        const double mean = n > 0 ? design.col(j).mean() : 0.0;
        const double sd = n > 1 ? std::sqrt((design.col(j).array() - mean).square().sum() / static_cast<double>(n - 1)) : 0.0;
        if (!(sd > 0.0)) {
            constant.push_back(spec.predictors[static_cast<std::size_t>(j)]);
            continue;
        }
        if (spec.standardize_predictors) design.col(j) = (design.col(j).array() - mean) / sd;
    }
    if (!constant.empty()) {
        std::string msg = "rank-deficient design; collinear columns: Intercept";
        for (const auto& c : constant) msg += " " + c;
        throw Error(msg);
    }
    RegressionResult result = ols(y, design, spec.predictors);
    result.model = spec.name;
    result.criterion = "X" + std::to_string(mode + 1);
    result.dropped = dropped;
    return result;
}

std::string format_regression_report(const std::vector<RegressionResult>& models, char delimiter) {
    std::vector<std::string> terms;
    for (const auto& m : models)
        for (const auto& c : m.coefficients)
            if (std::find(terms.begin(), terms.end(), c.name) == terms.end()) terms.push_back(c.name);

    std::string out = "term";
    for (const auto& m : models) {
        for (const char* suffix : {".coef", ".se", ".sig"}) {
            out.push_back(delimiter);
            out += m.model + suffix;
        }
    }
    out.push_back('\n');
    out += "criterion";
    for (const auto& m : models) {
        out.push_back(delimiter);
        out += m.criterion;
        out.push_back(delimiter);
        out.push_back(delimiter);
    }
    out.push_back('\n');
    for (const auto& term : terms) {
        out += term;
        for (const auto& m : models) {
            auto it = std::find_if(m.coefficients.begin(), m.coefficients.end(),
                                   [&](const Coefficient& c) { return c.name == term; });
            out.push_back(delimiter);
            if (it != m.coefficients.end()) out += format_double(it->estimate);
            out.push_back(delimiter);
            if (it != m.coefficients.end()) out += format_double(it->std_error);
            out.push_back(delimiter);
            if (it != m.coefficients.end()) out += it->stars;
        }
        out.push_back('\n');
    }
    auto summary_row = [&](const char* name, auto getter) {
        out += name;
        for (const auto& m : models) {
            out.push_back(delimiter);
            out += getter(m);
            out.push_back(delimiter);
            out.push_back(delimiter);
        }
        out.push_back('\n');
    };
    summary_row("R2", [](const RegressionResult& m) { return format_double(m.r2); });
    summary_row("Adjusted R2", [](const RegressionResult& m) { return format_double(m.adj_r2); });
    summary_row("N", [](const RegressionResult& m) { return std::to_string(m.observations); });
    return out;
}

} // namespace chpca
