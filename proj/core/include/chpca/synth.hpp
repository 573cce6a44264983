#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "chpca/customer.hpp"
#include "chpca/ingest.hpp"
#include "chpca/panel.hpp"

namespace chpca {

/// One common signal made of K tones. Series a receives
/// loadings[a] * sqrt(2/K) * sum_k cos(2 pi c_k (t - lags[a]) / T + phases[k]),
/// so the factor has unit variance and a positive lag delays the series.
struct Factor {
    std::vector<double> cycles;    // c_k, cycles per T
    std::vector<double> phases;    // per tone; empty means all zero
    std::vector<double> lags;      // days, one per series
    std::vector<double> loadings;  // in [0, 1], one per series
};

struct SynthSpec {
    std::vector<std::string> products;
    std::vector<Variable> variables{Variable::P, Variable::Q, Variable::TVAd};
    std::size_t length = 365;
    std::vector<Factor> factors;
    double noise_sd = 0.0;
    /// Firm id per product (empty: no firm grouping). Each firm adds a
    /// zero-lag factor at `firm_cycles + firm ordinal` shared by its products.
    std::vector<int> firms;
    double firm_loading = 0.0;
    double firm_cycles = 29.0;
    std::uint64_t seed = 0;
    bool allow_fractional_cycles = false;
    Day start = parse_iso_date("2013-04-01");

    std::size_t series_count() const { return products.size() * variables.size(); }
};

/// Series labels in generation order (product-major).
std::vector<SeriesLabel> synth_labels(const SynthSpec& spec);

struct GroundTruth {
    std::vector<SeriesLabel> labels;
    Eigen::MatrixXd lags;      // N x F (firm factors included)
    Eigen::MatrixXd loadings;  // N x F
    /// omega (lag_a - lag_b) for pairs that share exactly one single-frequency
    /// factor and load on nothing else; NaN otherwise.
    Eigen::MatrixXd expected_theta;
};

struct SynthResult {
    PanelSeries panel;  // raw, not standardized
    GroundTruth truth;
};

/// Deterministic given the spec (including seed). Throws chpca::Error when
/// T < 64, a lag lies outside (-T/4, T/4), a loading outside [0, 1], a
/// factor has the wrong number of entries, or a cycle count is fractional
/// without allow_fractional_cycles.
SynthResult generate(const SynthSpec& spec);

/// Integer cycle counts lo, lo+1, ..., hi.
std::vector<double> cycle_band(int lo, int hi);

struct LeadLagOptions {
    std::vector<double> cycles{13.0};
    double loading = 0.8;
    double noise_sd = 0.0;
    std::uint64_t seed = 0;
    std::size_t length = 365;
    /// One independent factor per product instead of one shared by all.
    bool per_product = false;
    /// With per_product, an extra factor shared by every product with the
    /// same variable lags and this loading (0: none).
    double market_loading = 0.0;
};

/// Per-variable lags, identical across products. Tone phases are drawn
/// uniformly from the seed.
SynthSpec lead_lag_spec(std::size_t n_products, const std::vector<std::pair<Variable, double>>& variable_lags,
                        const LeadLagOptions& options);

void save_ground_truth(const std::filesystem::path& dir, const GroundTruth& truth);

struct SynthEventsOptions {
    std::size_t customers = 40;
    double participation = 0.3;  // chance a customer is active on a given series-day
    std::uint64_t seed = 0;
};

/// Raw events whose aggregate reproduces level(variable) * exp(0.25 x) for a
/// standardized panel x: prices are shared by all buyers of the day, other
/// totals are split among the day's active customers.
RawEventTable synth_events(const PanelSeries& standardized, const SynthEventsOptions& options);

/// Random demographic profiles within the declared ranges.
ProfileTable synth_profiles(const std::vector<std::string>& ids, std::uint64_t seed);

void save_events(const std::filesystem::path& path, const RawEventTable& table);
void save_profiles(const std::filesystem::path& path, const ProfileTable& profiles);

} // namespace chpca
