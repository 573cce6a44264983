#include <cmath>

#include <gtest/gtest.h>

#include "chpca/eigenmodes.hpp"
#include "chpca/error.hpp"
#include "chpca/hilbert.hpp"
#include "chpca/hodge.hpp"
#include "chpca/ingest.hpp"
#include "chpca/significance.hpp"
#include "chpca/synth.hpp"
#include "support.hpp"

using namespace chpca;
namespace ts = testing_support;

namespace {

// One tone shared by n single-variable series with the given lags.
SynthSpec tone_chain(const std::vector<double>& lags, double cycles, std::size_t length, double noise,
                     std::uint64_t seed) {
    SynthSpec spec;
    spec.variables = {Variable::Q};
    for (std::size_t i = 0; i < lags.size(); ++i) spec.products.push_back("S" + std::to_string(i));
    spec.length = length;
    spec.noise_sd = noise;
    spec.seed = seed;
    Factor f;
    f.cycles = {cycles};
    f.phases = {0.4};
    f.lags = lags;
    f.loadings.assign(lags.size(), 0.9);
    spec.factors.push_back(f);
    return spec;
}

PolarForm polar_of(const SynthResult& r) { return polar(correlation(complexify(standardize(r.panel)))); }

} // namespace

TEST(Synth, ClosedFormSeries) {
    auto spec = tone_chain({0.0, 3.0}, 13.0, 364, 0.0, 1);
    const auto r = generate(spec);
    const double w = 2.0 * ts::kPi * 13.0 / 364.0;
    for (std::size_t t = 0; t < 364; t += 17) {
        const double td = static_cast<double>(t);
        // Single tone: sqrt(2/K) = sqrt(2).
        EXPECT_NEAR(r.panel.values(0, static_cast<Eigen::Index>(t)), 0.9 * std::sqrt(2.0) * std::cos(w * td + 0.4), 1e-12);
        EXPECT_NEAR(r.panel.values(1, static_cast<Eigen::Index>(t)), 0.9 * std::sqrt(2.0) * std::cos(w * (td - 3.0) + 0.4),
                    1e-12);
    }
    EXPECT_EQ(format_iso_date(r.panel.days.front()), "2013-04-01");
    EXPECT_EQ(r.panel.labels[1].product, "S1");
}

TEST(Synth, ThetaMatchesGroundTruth) {
    const auto r = generate(tone_chain({0.0, 3.0}, 13.0, 364, 0.0, 1));
    const double expected = 2.0 * ts::kPi * 3.0 / 28.0;
    EXPECT_NEAR(r.truth.expected_theta(1, 0), expected, 1e-12);
    EXPECT_NEAR(expected, 0.673, 5e-4);
    EXPECT_NEAR(polar_of(r).theta(1, 0), expected, 1e-9);

    // Noise scatters the phase without biasing it.
    double mean = 0;
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const double theta = polar_of(generate(tone_chain({0.0, 3.0}, 13.0, 364, 0.3, seed))).theta(1, 0);
        EXPECT_NEAR(theta, expected, 0.15);
        mean += theta / 40.0;
    }
    EXPECT_NEAR(mean, expected, 0.02);
}

TEST(Synth, ZeroLoadingsGiveNoSignificantMode) {
    auto spec = ts::factor_spec(8, 0, 0.0, 1.0, 17);
    const auto r = generate(spec);
    EXPECT_TRUE(std::isnan(r.truth.expected_theta(0, 1)));
    RrsOptions o;
    o.n_sims = 500;
    o.seed = 4;
    EXPECT_EQ(rrs_test(complexify(standardize(r.panel)), o).significant_count(), 0u);
}

TEST(Synth, LeaderHasHighestPotential) {
    for (double noise : {0.0, 0.3}) {
        const auto r = generate(tone_chain({0.0, 2.0, 4.0, 6.0}, 13.0, 364, noise, 5));
        const auto p = polar_of(r);
        const auto net = build_network(p, select_threshold(p, {0}), r.panel.labels);
        const auto h = hodge_decompose(net);
        for (Eigen::Index a = 0; a + 1 < 4; ++a) EXPECT_GT(h.potentials(a), h.potentials(a + 1)) << "noise " << noise;
    }
}

TEST(Synth, DeterministicPerSeed) {
    const auto spec = ts::factor_spec(6, 3, 0.7, 0.5, 9);
    EXPECT_EQ(generate(spec).panel.values, generate(spec).panel.values);
    auto other = spec;
    other.seed = 10;
    EXPECT_NE(generate(spec).panel.values, generate(other).panel.values);
}

TEST(Synth, NoiseLowersCorrelation) {
    double previous = 2.0;
    for (double noise : {0.0, 0.3, 0.8, 2.0}) {
        const auto p = polar_of(generate(tone_chain({0.0, 2.0}, 13.0, 364, noise, 3)));
        EXPECT_LT(p.rho(0, 1), previous) << noise;
        previous = p.rho(0, 1);
    }
}

TEST(Synth, Validation) {
    auto good = tone_chain({0.0, 3.0}, 13.0, 364, 0.1, 1);
    EXPECT_NO_THROW(generate(good));
    auto s = good;
    s.length = 63;
    EXPECT_THROW(generate(s), Error);
    s = good;
    s.factors[0].lags[1] = 91.0;
    EXPECT_THROW(generate(s), Error);
    s = good;
    s.factors[0].loadings[0] = 1.2;
    EXPECT_THROW(generate(s), Error);
    s = good;
    s.factors[0].cycles = {13.5};
    EXPECT_THROW(generate(s), Error);
    s.allow_fractional_cycles = true;
    EXPECT_NO_THROW(generate(s));
    s = good;
    s.factors[0].cycles = {182.0};
    EXPECT_THROW(generate(s), Error);
    s = good;
    s.factors[0].lags.pop_back();
    EXPECT_THROW(generate(s), Error);
    s = good;
    s.noise_sd = -1.0;
    EXPECT_THROW(generate(s), Error);
}

TEST(Synth, FirmFactorsAreShared) {
    auto spec = ts::factor_spec(4, 0, 0.0, 0.2, 3);
    spec.firms = {1, 1, 2, 2};
    spec.firm_loading = 0.9;
    const auto r = generate(spec);
    EXPECT_EQ(r.truth.loadings.cols(), 3);
    const auto p = polar_of(r);
    EXPECT_GT(p.rho(0, 1), 0.8);
    EXPECT_GT(p.rho(2, 3), 0.8);
    EXPECT_LT(p.rho(0, 2), 0.3);
}

TEST(LeadLagSpec, LayoutAndPerProductFactors) {
    LeadLagOptions o;
    o.cycles = cycle_band(1, 24);
    o.per_product = true;
    o.seed = 3;
    const auto spec = lead_lag_spec(11, {{Variable::P, 0.0}, {Variable::Q, 2.0}}, o);
    EXPECT_EQ(spec.products.front(), "A1");
    EXPECT_EQ(spec.products[9], "B1");
    ASSERT_EQ(spec.factors.size(), 11u);
    EXPECT_EQ(spec.factors[2].loadings[4], 0.8);
    EXPECT_EQ(spec.factors[2].loadings[0], 0.0);
    EXPECT_EQ(spec.factors[2].lags[5], 2.0);
    EXPECT_EQ(spec.series_count(), 22u);
    EXPECT_EQ(cycle_band(3, 5), (std::vector<double>{3, 4, 5}));

    o.market_loading = 0.4;
    const auto with_market = lead_lag_spec(3, {{Variable::P, 0.0}, {Variable::Q, 2.0}}, o);
    ASSERT_EQ(with_market.factors.size(), 4u);
    EXPECT_EQ(with_market.factors[3].loadings, std::vector<double>(6, 0.4));
    EXPECT_EQ(with_market.factors[3].lags[3], 2.0);
    o.per_product = false;
    EXPECT_EQ(lead_lag_spec(3, {{Variable::P, 0.0}}, o).factors.size(), 1u);
}

TEST(SynthEvents, AggregateReproducesLevels) {
    LeadLagOptions o;
    o.cycles = cycle_band(1, 24);
    o.noise_sd = 0.3;
    o.seed = 8;
    const auto spec = lead_lag_spec(2, {{Variable::P, 0.0}, {Variable::Q, 2.0}, {Variable::TVAd, 4.0}}, o);
    const auto x = standardize(generate(spec).panel);
    SynthEventsOptions eo;
    eo.customers = 12;
    eo.seed = 2;
    const auto events = synth_events(x, eo);
    const DayRange w{x.days.front(), x.days.back()};
    const auto agg = aggregate(events, w);
    const double levels[] = {0.3, 20000.0, 3000.0};
    for (std::size_t a = 0; a < x.labels.size(); ++a) {
        const auto it = std::find(agg.panel.labels.begin(), agg.panel.labels.end(), x.labels[a]);
        ASSERT_NE(it, agg.panel.labels.end());
        const auto row = static_cast<Eigen::Index>(it - agg.panel.labels.begin());
        const double level = levels[a % 3];
        for (Eigen::Index t = 0; t < x.values.cols(); ++t)
            EXPECT_NEAR(agg.panel.values(row, t) / (level * std::exp(0.25 * x.values(static_cast<Eigen::Index>(a), t))), 1.0,
                        1e-9);
    }
    const auto profiles = synth_profiles({"C0001", "C0002"}, 1);
    for (const auto& [name, range] : profile_ranges())
        for (double v : profiles.column(name)) {
            EXPECT_GE(v, range.lo);
            EXPECT_LE(v, range.hi);
        }
}
