#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "chpca/hilbert.hpp"

namespace chpca {

enum class SignificanceRule {
    MeanPlusTwoSigma,  // lambda > mu + 2 sigma
    Quantile977,       // lambda > empirical 97.7th percentile
};

inline constexpr std::size_t kDefaultSimulations = 10000;
inline constexpr std::size_t kDefaultBandTrials = 100;

struct RrsOptions {
    std::size_t n_sims = kDefaultSimulations;
    std::uint64_t seed = 0;
    SignificanceRule rule = SignificanceRule::MeanPlusTwoSigma;
    unsigned threads = 1;
};

/// Null distribution summary for one eigenvalue rank.
struct RankSummary {
    double eigenvalue = 0.0;
    double mean = 0.0;
    double sd = 0.0;
    double z_score = 0.0;
    double q025 = 0.0;
    double median = 0.0;
    double q975 = 0.0;
    double q977 = 0.0;
    bool significant = false;
};

struct RrsResult {
    std::vector<RankSummary> ranks;
    std::size_t n_sims = 0;
    std::uint64_t seed = 0;
    SignificanceRule rule = SignificanceRule::MeanPlusTwoSigma;

    /// Number of leading significant ranks.
    std::size_t significant_count() const;
};

/// Per-simulation seed derived from the master seed; identical for any
/// thread count or execution order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Cyclic rotation: out(t) = x((t + offset) mod T).
Eigen::VectorXd rotate_series(const Eigen::Ref<const Eigen::VectorXd>& x, std::size_t offset);

/// Spectrum after rotating each real row by its own offset, then
/// complexifying and re-standardizing.
Eigen::VectorXd rotated_spectrum(const Eigen::MatrixXd& real_rows, std::span<const std::size_t> offsets);

/// Rotational random simulation. The real parts of `panel.unnormalized` are
/// the source series; each simulation draws one uniform offset in [0, T) per
/// series. Ranks after the first insignificant one are reported insignificant.
RrsResult rrs_test(const ComplexPanel& panel, const RrsOptions& options);

std::string format_rrs_report(const RrsResult& result, char delimiter = ',');

struct BandOptions {
    std::size_t n_trials = kDefaultBandTrials;
    std::uint64_t seed = 0;
    double min_overlap = 0.5;
    unsigned threads = 1;
};

struct ModeBand {
    std::size_t mode = 0;
    double threshold = 0.0;  // mean + 2 sd of injected-series magnitudes
    double mean = 0.0;
    double sd = 0.0;
    double median = 0.0;
    double q977 = 0.0;
};

struct ComponentBand {
    std::vector<ModeBand> modes;
    std::size_t n_trials = 0;
    std::size_t n_discarded = 0;

    const ModeBand& band_for(std::size_t mode) const;
};

/// Noise-injection significance band for eigenvector components. Each trial
/// appends one standard Gaussian series, recomputes the decomposition,
/// matches every tracked mode by maximal overlap on the original
/// coordinates, and records the injected series' component magnitude. A
/// trial in which any tracked mode matches with overlap below
/// `min_overlap` is discarded; more than half discarded is an error.
ComponentBand component_bands(const ComplexPanel& panel, std::span<const std::size_t> modes,
                              const BandOptions& options);

std::string format_band_report(const ComponentBand& band, char delimiter = ',');

} // namespace chpca
