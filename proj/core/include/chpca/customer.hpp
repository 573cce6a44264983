#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "chpca/eigenmodes.hpp"
#include "chpca/ingest.hpp"
#include "chpca/panel.hpp"

namespace chpca {

struct CustomerSeries {
    std::string id;
    Eigen::MatrixXd values;  // N x T, rows in aggregate label order
};

struct CustomerPanel {
    std::vector<SeriesLabel> labels;
    std::vector<CustomerSeries> customers;
};

/// Splits raw events by customer and aggregates each customer over the
/// aggregate panel's labels. Customer price rows are 0 on days without that
/// customer's purchases (no carry-forward). Customers are ordered by id.
CustomerPanel customer_panel(const RawEventTable& raw, const std::vector<SeriesLabel>& labels,
                             const DayRange& window);

struct ComplexCustomer {
    std::string id;
    Eigen::MatrixXcd values;       // N x T standardized; all-zero source rows stay zero
    std::vector<std::size_t> nonzero_days;  // per row, days with a nonzero source value
};

/// Complexifies and standardizes every (customer, series) row. Throws
/// chpca::Error naming the customer and series for a constant nonzero row.
std::vector<ComplexCustomer> customer_complexify(const CustomerPanel& panel, unsigned threads = 1);

/// Coordinates X(n, p) = (1/T) sum_t |a_{n,p}(t)|^2 with
/// a_{n,p}(t) = sum_a conj(e_n[a]) zhat_{p,a}(t).
struct CustomerSpace {
    std::vector<std::size_t> modes;
    std::vector<std::string> ids;
    Eigen::MatrixXd coordinates;            // modes x P
    std::vector<Eigen::MatrixXcd> signals;  // per customer, modes x T; empty unless requested
};

CustomerSpace project(std::span<const ComplexCustomer> customers, const EigenSystem& sys,
                      std::span<const std::size_t> modes, bool keep_signals = false);

std::string format_coordinates(const CustomerSpace& space, char delimiter = ',');

/// Named per-customer covariates. Missing values are NaN.
struct ProfileTable {
    std::vector<std::string> ids;
    std::map<std::string, std::vector<double>> columns;

    std::size_t size() const { return ids.size(); }
    const std::vector<double>& column(const std::string& name) const;
};

/// Declared ranges of the demographic columns (inclusive).
struct ColumnRange {
    double lo;
    double hi;
};
const std::map<std::string, ColumnRange>& profile_ranges();

/// Reads customer_id plus any of the demographic columns; empty or "NA"
/// cells become missing. Values outside the declared range throw ParseError.
ProfileTable load_profiles(const std::filesystem::path& path, char delimiter = ',');

/// Adds total_frequency (number of purchases), total_quantity and
/// qty_<product> for every product in `products`, computed from Q rows.
void add_purchase_covariates(ProfileTable& profiles, const RawEventTable& raw,
                             const std::vector<std::string>& products);

struct ModelSpec {
    std::string name;
    std::vector<std::string> predictors;
    bool standardize_predictors = true;
};

/// Total-quantity model (x.1) and per-product-quantity model (x.2).
ModelSpec total_quantity_model(std::string name);
ModelSpec per_product_model(std::string name, const std::vector<std::string>& products);

struct Coefficient {
    std::string name;
    double estimate = 0.0;
    double std_error = 0.0;
    double t_value = 0.0;
    double p_value = 1.0;
    std::string stars;  // "aa" p<.001, "a" p<.01, "b" p<.05, "c" p<.10
};

struct RegressionResult {
    std::string model;
    std::string criterion;
    std::vector<Coefficient> coefficients;  // intercept first
    double r2 = 0.0;
    double adj_r2 = 0.0;
    std::size_t observations = 0;
    std::size_t dropped = 0;  // rows with a missing value
};

std::string significance_stars(double p_value);

/// OLS with intercept and classical standard errors. `design` excludes the
/// intercept column. Throws chpca::Error listing collinear columns when the
/// design is rank deficient.
RegressionResult ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& design, const std::vector<std::string>& names);

/// Regresses coordinate `mode` of the customer space on the profile columns
/// of `spec`, matching customers by id and dropping rows with missing values.
RegressionResult regress(const CustomerSpace& space, std::size_t mode, const ProfileTable& profiles,
                         const ModelSpec& spec);

std::string format_regression_report(const std::vector<RegressionResult>& models, char delimiter = ',');

} // namespace chpca
