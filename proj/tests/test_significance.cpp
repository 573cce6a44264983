#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "chpca/eigenmodes.hpp"
#include "chpca/error.hpp"
#include "chpca/hilbert.hpp"
#include "chpca/significance.hpp"
#include "chpca/synth.hpp"
#include "support.hpp"

using namespace chpca;
namespace ts = testing_support;

namespace {

ComplexPanel planted(std::size_t n, std::size_t loaded, std::uint64_t seed, double loading = 0.8) {
    return complexify(standardize(generate(ts::factor_spec(n, loaded, loading, 0.6, seed)).panel));
}

RrsOptions opts(std::size_t n_sims, std::uint64_t seed, unsigned threads = 1) {
    RrsOptions o;
    o.n_sims = n_sims;
    o.seed = seed;
    o.threads = threads;
    return o;
}

double circular_autocorrelation(const Eigen::VectorXd& x, Eigen::Index lag) {
    const auto T = x.size();
    double s = 0;
    for (Eigen::Index t = 0; t < T; ++t) s += x(t) * x((t + lag) % T);
    return s;
}

} // namespace

TEST(RotateSeries, CyclicShiftByHand) {
    Eigen::VectorXd x(5);
    x << 0, 1, 2, 3, 4;
    Eigen::VectorXd expected(5);
    expected << 2, 3, 4, 0, 1;
    EXPECT_EQ(rotate_series(x, 2), expected);
    EXPECT_EQ(rotate_series(x, 0), x);
    EXPECT_EQ(rotate_series(x, 5), x);
}

TEST(RotateSeries, PreservesCircularAutocorrelation) {
    const Eigen::VectorXd x = ts::gaussian_rows(1, 120, 4).row(0).transpose();
    const Eigen::VectorXd r = rotate_series(x, 37);
    for (Eigen::Index lag = 0; lag < 120; lag += 7)
        EXPECT_NEAR(circular_autocorrelation(x, lag), circular_autocorrelation(r, lag), 1e-10);
}

TEST(RotatedSpectrum, ZeroOffsetsReproduceActualSpectrum) {
    const auto z = planted(8, 4, 2);
    const std::vector<std::size_t> zeros(8, 0);
    const Eigen::VectorXd actual = spectrum(correlation(z));
    EXPECT_LT((rotated_spectrum(z.unnormalized.real(), zeros) - actual).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Rrs, NoiseOnlyPanelHasNoSignificantMode) {
    const auto z = complexify(ts::make_panel(ts::gaussian_rows(10, 365, 21)));
    const auto r = rrs_test(z, opts(1000, 5));
    EXPECT_EQ(r.significant_count(), 0u);
    EXPECT_EQ(r.ranks.size(), 10u);
}

TEST(Rrs, PlantedBroadbandFactorIsSignificant) {
    const auto r = rrs_test(planted(10, 6, 3), opts(500, 5));
    ASSERT_GE(r.significant_count(), 1u);
    EXPECT_GT(r.ranks[0].eigenvalue, r.ranks[0].mean + 2 * r.ranks[0].sd);
    EXPECT_GT(r.ranks[0].z_score, 5.0);
}

TEST(Rrs, LaggedCopiesOfOneToneAreInvisibleToRotation) {
    // Rotating a whole-cycle tone only shifts its phase, so the null keeps
    // the tone copies fully coherent and the top eigenvalue is reproduced.
    const Eigen::Index T = 365;
    Eigen::MatrixXd x = ts::gaussian_rows(10, T, 6);
    for (Eigen::Index i = 0; i < 6; ++i) x.row(i) = ts::tone(T, 13, 2.0 * static_cast<double>(i)).transpose();
    const auto r = rrs_test(complexify(ts::make_panel(x)), opts(200, 1));
    EXPECT_NEAR(r.ranks[0].eigenvalue, r.ranks[0].mean, 0.05 * r.ranks[0].eigenvalue);
    EXPECT_EQ(r.significant_count(), 0u);
}

TEST(Rrs, SignificanceIsContiguousFromTheTop) {
    const auto r = rrs_test(planted(12, 6, 9), opts(300, 2));
    bool seen_gap = false;
    for (const auto& rank : r.ranks) {
        if (!rank.significant) seen_gap = true;
        if (seen_gap) EXPECT_FALSE(rank.significant);
        if (rank.significant) EXPECT_GT(rank.eigenvalue, rank.mean + 2 * rank.sd);
    }
}

TEST(Rrs, DeterministicAndThreadIndependent) {
    const auto z = planted(8, 3, 4);
    const auto a = rrs_test(z, opts(200, 77, 1));
    const auto b = rrs_test(z, opts(200, 77, 1));
    const auto c = rrs_test(z, opts(200, 77, 4));
    EXPECT_EQ(format_rrs_report(a), format_rrs_report(b));
    EXPECT_EQ(format_rrs_report(a), format_rrs_report(c));
    for (std::size_t n = 0; n < a.ranks.size(); ++n) {
        EXPECT_EQ(a.ranks[n].q977, c.ranks[n].q977);
        EXPECT_EQ(a.ranks[n].median, c.ranks[n].median);
    }
    EXPECT_NE(format_rrs_report(a), format_rrs_report(rrs_test(z, opts(200, 78, 1))));
}

TEST(Rrs, MarginGrowsWithLoadedSeries) {
    double previous = -1e9;
    for (std::size_t loaded : {2u, 4u, 8u}) {
        double margin = 0;
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            const auto r = rrs_test(planted(12, loaded, seed), opts(200, seed));
            margin += r.ranks[0].eigenvalue - (r.ranks[0].mean + 2 * r.ranks[0].sd);
        }
        EXPECT_GT(margin, previous) << loaded;
        previous = margin;
    }
}

TEST(Rrs, QuantileRuleAndGuards) {
    const auto z = planted(8, 5, 5);
    auto o = opts(400, 3);
    o.rule = SignificanceRule::Quantile977;
    const auto r = rrs_test(z, o);
    ASSERT_GE(r.significant_count(), 1u);
    EXPECT_GT(r.ranks[0].eigenvalue, r.ranks[0].q977);
    EXPECT_THROW(rrs_test(z, opts(99, 1)), Error);
}

TEST(Rrs, ReportNotesReducedSimulationCount) {
    const auto z = planted(6, 3, 5);
    const auto text = format_rrs_report(rrs_test(z, opts(100, 1)));
    EXPECT_NE(text.find("reduced simulation count n_sims=100"), std::string::npos);
    EXPECT_NE(text.find("rank,lambda,mu,sigma,z_score,significant"), std::string::npos);
}

TEST(ComponentBands, NoiseThresholdNearRandomComponentScale) {
    const auto z = complexify(ts::make_panel(ts::gaussian_rows(10, 365, 31)));
    BandOptions o;
    o.n_trials = 100;
    o.seed = 3;
    const std::vector<std::size_t> modes{0, 1};
    const auto band = component_bands(z, modes, o);
    EXPECT_EQ(band.n_trials, 100u);
    for (const auto& m : band.modes) {
        EXPECT_GT(m.threshold, 0.1);
        EXPECT_LT(m.threshold, 0.7);
        EXPECT_NEAR(m.threshold, m.mean + 2 * m.sd, 1e-12);
    }
}

TEST(ComponentBands, PlantedComponentsStandOut) {
    const auto z = planted(20, 8, 7);
    const auto sys = eigendecompose(correlation(z), z);
    BandOptions o;
    o.n_trials = 100;
    o.seed = 11;
    const std::vector<std::size_t> modes{0};
    const auto band = component_bands(z, modes, o);
    const double thr = band.band_for(0).threshold;
    std::size_t below = 0;
    for (Eigen::Index a = 0; a < 20; ++a) {
        const double mag = std::abs(sys.eigenvectors(a, 0));
        if (a < 8) EXPECT_GT(mag, thr) << a;
        else below += mag < thr;
    }
    EXPECT_GE(below, 10u);
}

TEST(ComponentBands, DeterministicAndGuarded) {
    const auto z = planted(8, 4, 8);
    BandOptions o;
    o.n_trials = 40;
    o.seed = 1;
    const std::vector<std::size_t> modes{0};
    EXPECT_EQ(format_band_report(component_bands(z, modes, o)), format_band_report(component_bands(z, modes, o)));
    o.threads = 3;
    EXPECT_EQ(format_band_report(component_bands(z, modes, o)), format_band_report(component_bands(z, modes, {40, 1})));
    o.n_trials = 29;
    EXPECT_THROW(component_bands(z, modes, o), Error);
}

TEST(DeriveSeed, DistinctStreams) {
    EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
    EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
    EXPECT_EQ(derive_seed(9, 4), derive_seed(9, 4));
}
