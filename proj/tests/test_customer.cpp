#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "chpca/customer.hpp"
#include "chpca/eigenmodes.hpp"
#include "chpca/error.hpp"
#include "chpca/hilbert.hpp"
#include "chpca/ingest.hpp"
#include "support.hpp"

using namespace chpca;
namespace ts = testing_support;

namespace {

DayRange window(int days) {
    const Day start = parse_iso_date("2013-04-01");
    return {start, start + std::chrono::days(days - 1)};
}

RawEvent event(std::string customer, std::string product, Variable v, const DayRange& w, int day, double value) {
    return {std::move(customer), product, product + "-01", v, w.at(static_cast<std::size_t>(day)), value};
}

RawEventTable random_events(const DayRange& w, std::size_t customers, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RawEventTable t;
    for (std::size_t c = 0; c < customers; ++c) {
        const std::string id = "c" + std::to_string(c);
        for (int d = 0; d < static_cast<int>(w.length()); ++d) {
            for (const char* product : {"A1", "B1"}) {
                if (u(rng) < 0.4) t.rows.push_back(event(id, product, Variable::Q, w, d, 1 + std::floor(5 * u(rng))));
                if (u(rng) < 0.3) t.rows.push_back(event(id, product, Variable::Visit, w, d, 1 + std::floor(3 * u(rng))));
            }
        }
    }
    return t;
}

EigenSystem random_system(Eigen::Index n, std::uint64_t seed) {
    const auto z = complexify(ts::make_panel(ts::gaussian_rows(n, 128, seed)));
    return eigendecompose(correlation(z));
}

std::vector<std::size_t> all_modes(std::size_t n) {
    std::vector<std::size_t> m(n);
    std::iota(m.begin(), m.end(), 0);
    return m;
}

// Customer whose every series is a multiple of one complex signal.
ComplexCustomer rank_one_customer(const Eigen::VectorXcd& direction, const Eigen::VectorXcd& signal) {
    return {"p", direction * signal.transpose(), {}};
}

} // namespace

TEST(CustomerPanel, SingleCustomerReproducesAggregate) {
    const auto w = window(30);
    RawEventTable t;
    for (int d = 0; d < 30; ++d) {
        t.rows.push_back(event("only", "A1", Variable::Q, w, d, 1 + d % 4));
        t.rows.push_back(event("only", "A1", Variable::P, w, d, 0.3 + 0.01 * d));
        if (d % 3 == 0) t.rows.push_back(event("only", "A1", Variable::TVAd, w, d, 100));
    }
    const auto agg = aggregate(t, w);
    const auto cp = customer_panel(t, agg.panel.labels, w);
    ASSERT_EQ(cp.customers.size(), 1u);
    EXPECT_LT((cp.customers[0].values - agg.panel.values).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(CustomerPanel, QuantityRowsSumToAggregate) {
    const auto w = window(40);
    const auto t = random_events(w, 7, 3);
    const auto agg = aggregate(t, w);
    const auto cp = customer_panel(t, agg.panel.labels, w);
    ASSERT_EQ(cp.customers.size(), 7u);
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(agg.panel.values.rows(), agg.panel.values.cols());
    for (const auto& c : cp.customers) sum += c.values;
    for (const auto v : {Variable::Q, Variable::Visit})
        for (std::size_t i : indices_of(agg.panel.labels, v))
            EXPECT_LT((sum.row(static_cast<Eigen::Index>(i)) - agg.panel.values.row(static_cast<Eigen::Index>(i)))
                          .cwiseAbs()
                          .maxCoeff(),
                      1e-9);
    EXPECT_TRUE(std::is_sorted(cp.customers.begin(), cp.customers.end(),
                               [](const auto& a, const auto& b) { return a.id < b.id; }));
}

TEST(CustomerPanel, PriceIsZeroOnDaysWithoutPurchase) {
    const auto w = window(10);
    RawEventTable t;
    t.rows.push_back(event("a", "A1", Variable::P, w, 2, 0.5));
    t.rows.push_back(event("a", "A1", Variable::Q, w, 2, 1));
    t.rows.push_back(event("b", "A1", Variable::P, w, 6, 0.7));
    t.rows.push_back(event("b", "A1", Variable::Q, w, 6, 1));
    const auto agg = aggregate(t, w);
    const auto cp = customer_panel(t, agg.panel.labels, w);
    const auto p = static_cast<Eigen::Index>(indices_of(agg.panel.labels, Variable::P)[0]);
    const Eigen::VectorXd a = cp.customers[0].values.row(p).transpose();
    EXPECT_EQ(a(2), 0.5);
    EXPECT_EQ(a.sum(), 0.5);
}

TEST(CustomerComplexify, ZeroRowsStayZeroAndSpikesStandardize) {
    CustomerPanel panel;
    panel.labels = {{"A1", Variable::Q}, {"A1", Variable::Visit}};
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(2, 64);
    v(1, 10) = 3.0;
    panel.customers.push_back({"x", v});
    const auto z = customer_complexify(panel);
    ASSERT_EQ(z.size(), 1u);
    EXPECT_EQ(z[0].values.row(0).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(z[0].nonzero_days[0], 0u);
    EXPECT_EQ(z[0].nonzero_days[1], 1u);
    EXPECT_NEAR(z[0].values.row(1).squaredNorm() / 64.0, 1.0, 1e-10);
    EXPECT_LT(std::abs(z[0].values.row(1).sum()), 1e-10);
}

TEST(CustomerComplexify, ConstantRowNamesCustomerAndSeries) {
    CustomerPanel panel;
    panel.labels = {{"A1", Variable::Q}};
    panel.customers.push_back({"c42", Eigen::MatrixXd::Constant(1, 32, 2.0)});
    try {
        customer_complexify(panel);
        FAIL();
    } catch (const Error& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("c42"), std::string::npos);
        EXPECT_NE(msg.find("A1:Q"), std::string::npos);
    }
}

TEST(Project, SingleModeCustomer) {
    const Eigen::Index n = 6;
    const auto sys = random_system(n, 4);
    const Eigen::VectorXcd s = ts::gaussian_rows(2, 100, 9).row(0).transpose().cast<std::complex<double>>() +
                               std::complex<double>(0, 1) * ts::gaussian_rows(2, 100, 9).row(1).transpose();
    const std::vector<ComplexCustomer> customers{rank_one_customer(sys.eigenvectors.col(2), s)};
    const auto modes = all_modes(static_cast<std::size_t>(n));
    const auto space = project(customers, sys, modes);
    const double expected = s.squaredNorm() / 100.0;
    for (Eigen::Index m = 0; m < n; ++m) EXPECT_NEAR(space.coordinates(m, 0), m == 2 ? expected : 0.0, 1e-10) << m;
}

TEST(Project, CoordinatesSumToCustomerEnergy) {
    // Over all modes the coordinates add up to (1/T) sum_a sum_t |z_a(t)|^2.
    const Eigen::Index n = 5;
    const auto sys = random_system(n, 6);
    const auto z = complexify(ts::make_panel(ts::gaussian_rows(n, 80, 12)));
    const std::vector<ComplexCustomer> customers{{"q", z.values, {}}};
    const auto space = project(customers, sys, all_modes(5));
    EXPECT_NEAR(space.coordinates.col(0).sum(), z.values.squaredNorm() / 80.0, 1e-9);
    EXPECT_GE(space.coordinates.minCoeff(), 0.0);
}

TEST(Project, InvariantUnderEigenvectorPhase) {
    const auto sys = random_system(5, 7);
    auto rotated = sys;
    for (Eigen::Index m = 0; m < 5; ++m) rotated.eigenvectors.col(m) *= std::polar(1.0, 0.9 * static_cast<double>(m + 1));
    const auto z = complexify(ts::make_panel(ts::gaussian_rows(5, 70, 3)));
    const std::vector<ComplexCustomer> customers{{"a", z.values, {}}, {"b", Eigen::MatrixXcd::Zero(5, 70), {}}};
    const std::vector<std::size_t> modes{0, 1};
    const auto a = project(customers, sys, modes);
    const auto b = project(customers, rotated, modes);
    EXPECT_LT((a.coordinates - b.coordinates).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(a.coordinates.col(1).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Project, CustomerOrderPermutesColumns) {
    const auto sys = random_system(4, 8);
    std::vector<ComplexCustomer> customers;
    for (std::uint64_t s = 0; s < 4; ++s)
        customers.push_back({"c" + std::to_string(s), complexify(ts::make_panel(ts::gaussian_rows(4, 64, 30 + s))).values, {}});
    const std::vector<std::size_t> modes{0, 1};
    const auto a = project(customers, sys, modes);
    std::reverse(customers.begin(), customers.end());
    const auto b = project(customers, sys, modes);
    for (Eigen::Index p = 0; p < 4; ++p) EXPECT_EQ(a.coordinates.col(p), b.coordinates.col(3 - p));
    EXPECT_EQ(a.ids.front(), b.ids.back());
}

TEST(Project, Guards) {
    const auto sys = random_system(4, 9);
    const std::vector<ComplexCustomer> customers{{"a", Eigen::MatrixXcd::Zero(4, 64), {}}};
    const std::vector<std::size_t> bad{4};
    EXPECT_THROW(project(customers, sys, bad), Error);
    const std::vector<ComplexCustomer> wrong{{"a", Eigen::MatrixXcd::Zero(3, 64), {}}};
    const std::vector<std::size_t> ok{0};
    EXPECT_THROW(project(wrong, sys, ok), Error);
    const auto space = project(customers, sys, ok);
    EXPECT_EQ(format_coordinates(space).substr(0, 15), "customer_id,X1\n");
}

TEST(Ols, RecoversLineAndMatchesClosedForm) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    const Eigen::Index n = 200;
    Eigen::VectorXd x(n), y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        x(i) = g(rng);
        y(i) = 2.0 + 3.0 * x(i) + 0.5 * g(rng);
    }
    const auto r = ols(y, x, {"x"});
    // Simple regression closed form.
    const double xm = x.mean(), ym = y.mean();
    const double sxx = (x.array() - xm).square().sum();
    const double slope = ((x.array() - xm) * (y.array() - ym)).sum() / sxx;
    const double icept = ym - slope * xm;
    const double rss = (y.array() - icept - slope * x.array()).square().sum();
    const double s2 = rss / static_cast<double>(n - 2);
    EXPECT_NEAR(r.coefficients[1].estimate, slope, 1e-10);
    EXPECT_NEAR(r.coefficients[0].estimate, icept, 1e-10);
    EXPECT_NEAR(r.coefficients[1].std_error, std::sqrt(s2 / sxx), 1e-10);
    EXPECT_NEAR(r.coefficients[0].std_error, std::sqrt(s2 * (1.0 / n + xm * xm / sxx)), 1e-10);
    EXPECT_NEAR(slope, 3.0, 0.15);
    EXPECT_EQ(r.coefficients[1].stars, "aa");
    EXPECT_LT(r.coefficients[1].p_value, 1e-6);
    EXPECT_EQ(r.coefficients[0].name, "Intercept");
    EXPECT_LE(r.adj_r2, r.r2);
    EXPECT_NEAR(r.r2, 1.0 - rss / (y.array() - ym).square().sum(), 1e-12);
}

TEST(Ols, KnownTValue) {
    // Student t with 10 degrees of freedom: P(|T| > 2.228139) = 0.05.
    const Eigen::Index n = 12;
    Eigen::VectorXd x(n), y(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = static_cast<double>(i);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    for (Eigen::Index i = 0; i < n; ++i) y(i) = g(rng);
    const auto r = ols(y, x, {"x"});
    const auto& c = r.coefficients[1];
    EXPECT_NEAR(c.t_value, c.estimate / c.std_error, 1e-12);
    const double t = 2.228138851986274;
    // Keep the residuals and set the slope to t * se.
    Eigen::VectorXd resid = y - (r.coefficients[0].estimate + c.estimate * x.array()).matrix();
    const double sxx = (x.array() - x.mean()).square().sum();
    const double se = std::sqrt(resid.squaredNorm() / 10.0 / sxx);
    Eigen::VectorXd y2 = resid + (t * se) * x;
    const auto r2 = ols(y2, x, {"x"});
    EXPECT_NEAR(r2.coefficients[1].t_value, t, 1e-9);
    EXPECT_NEAR(r2.coefficients[1].p_value, 0.05, 1e-9);
}

TEST(Ols, ResidualsOrthogonalToDesign) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    const Eigen::Index n = 50;
    Eigen::MatrixXd X(n, 3);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < 3; ++j) X(i, j) = g(rng);
        y(i) = g(rng);
    }
    const auto r = ols(y, X, {"a", "b", "c"});
    Eigen::VectorXd fit = Eigen::VectorXd::Constant(n, r.coefficients[0].estimate);
    for (Eigen::Index j = 0; j < 3; ++j) fit += r.coefficients[static_cast<std::size_t>(j + 1)].estimate * X.col(j);
    const Eigen::VectorXd e = y - fit;
    EXPECT_LT(std::abs(e.sum()), 1e-10);
    EXPECT_LT((X.transpose() * e).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE(r.adj_r2, r.r2);
    EXPECT_GE(r.r2, 0.0);
}

TEST(Ols, RankDeficiencyNamesColumns) {
    Eigen::MatrixXd X(10, 2);
    Eigen::VectorXd y(10);
    for (Eigen::Index i = 0; i < 10; ++i) {
        X(i, 0) = static_cast<double>(i);
        X(i, 1) = 2.0 * static_cast<double>(i);
        y(i) = static_cast<double>(i * i);
    }
    try {
        ols(y, X, {"u", "v"});
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("collinear"), std::string::npos);
    }
    EXPECT_THROW(ols(y.head(2), X.topRows(2), {"u", "v"}), Error);
}

TEST(Stars, Thresholds) {
    EXPECT_EQ(significance_stars(0.0005), "aa");
    EXPECT_EQ(significance_stars(0.005), "a");
    EXPECT_EQ(significance_stars(0.03), "b");
    EXPECT_EQ(significance_stars(0.07), "c");
    EXPECT_EQ(significance_stars(0.2), "");
}

TEST(Profiles, LoadRangesMissingAndDuplicates) {
    const auto dir = ts::scratch_dir("profiles");
    {
        std::ofstream f(dir / "ok.csv");
        f << "customer_id,age,gender,household_income\nc1,3,1,5\nc2,NA,0,\nc3,9,0,1\n";
    }
    const auto p = load_profiles(dir / "ok.csv");
    ASSERT_EQ(p.size(), 3u);
    EXPECT_EQ(p.column("age")[0], 3.0);
    EXPECT_TRUE(std::isnan(p.column("age")[1]));
    EXPECT_TRUE(std::isnan(p.column("household_income")[1]));
    EXPECT_THROW(p.column("marital"), Error);
    {
        std::ofstream f(dir / "range.csv");
        f << "customer_id,age\nc1,3\nc2,10\n";
    }
    try {
        load_profiles(dir / "range.csv");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("3"), std::string::npos);
    }
    {
        std::ofstream f(dir / "dup.csv");
        f << "customer_id,age\nc1,3\nc1,4\n";
    }
    EXPECT_THROW(load_profiles(dir / "dup.csv"), ParseError);
}

TEST(Regress, MatchesCustomersAndDropsMissing) {
    CustomerSpace space;
    space.modes = {0};
    space.ids = {"a", "b", "c", "d", "e", "f", "z"};
    space.coordinates.resize(1, 7);
    ProfileTable profiles;
    profiles.ids = {"f", "e", "d", "c", "b", "a"};
    profiles.columns["x"] = {5, 4, std::nan(""), 2, 1, 0};
    for (Eigen::Index p = 0; p < 7; ++p) space.coordinates(0, p) = 1.0 + 2.0 * static_cast<double>(p);
    const auto r = regress(space, 0, profiles, {"m", {"x"}, false});
    EXPECT_EQ(r.observations, 5u);
    EXPECT_EQ(r.dropped, 2u);
    EXPECT_NEAR(r.coefficients[1].estimate, 2.0, 1e-12);
    EXPECT_NEAR(r.coefficients[0].estimate, 1.0, 1e-12);
    EXPECT_EQ(r.criterion, "X1");
    EXPECT_THROW(regress(space, 1, profiles, {"m", {"x"}, false}), Error);
    EXPECT_THROW(regress(space, 0, profiles, {"m", {"nope"}, false}), Error);

    profiles.columns["k"] = std::vector<double>(6, 1.0);
    try {
        regress(space, 0, profiles, {"m", {"x", "k"}, true});
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("k"), std::string::npos);
    }
}

TEST(Covariates, PurchaseTotals) {
    const auto w = window(5);
    RawEventTable t;
    t.rows.push_back(event("a", "A1", Variable::Q, w, 0, 2));
    t.rows.push_back(event("a", "B1", Variable::Q, w, 1, 3));
    t.rows.push_back(event("a", "B1", Variable::Visit, w, 1, 9));
    t.rows.push_back(event("b", "A1", Variable::Q, w, 2, 1));
    ProfileTable p;
    p.ids = {"a", "b", "c"};
    add_purchase_covariates(p, t, {"A1", "B1"});
    EXPECT_EQ(p.column("total_frequency"), (std::vector<double>{2, 1, 0}));
    EXPECT_EQ(p.column("total_quantity"), (std::vector<double>{5, 1, 0}));
    EXPECT_EQ(p.column("qty_B1"), (std::vector<double>{3, 0, 0}));
    const auto m = per_product_model("x.2", {"A1", "B1"});
    EXPECT_EQ(m.predictors.back(), "qty_B1");
    EXPECT_EQ(total_quantity_model("x.1").predictors.back(), "total_quantity");
}
