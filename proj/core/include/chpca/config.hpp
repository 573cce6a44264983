#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "chpca/ingest.hpp"

namespace chpca {

/// Everything a pipeline run depends on. Written as an INI-like file with one
/// section per stage; `to_ini` and `parse_ini` round-trip every field.
struct RunConfig {
    // [ingest]
    std::filesystem::path input;     // raw event file; empty means synth or panel
    std::filesystem::path panel;     // previously saved panel directory (panel.* files)
    std::string window_start;        // YYYY-MM-DD; empty means the data's first day
    std::string window_end;
    std::size_t min_days = 51;
    EventSchema schema;

    // [rrs]
    std::size_t n_sims = 10000;
    // [bands]
    std::size_t n_trials = 100;

    // [hodge]
    std::optional<double> rho_star;
    std::optional<double> days_scale;
    std::size_t allowed_isolates = 1;

    // [project]
    std::filesystem::path profiles;
    std::size_t project_modes = 2;

    // [synth]
    std::size_t synth_products = 6;
    std::size_t synth_length = 365;
    std::size_t synth_min_cycle = 1;   // the factor spans integer cycle counts
    std::size_t synth_max_cycle = 24;  // min..max per window
    bool synth_per_product = true;     // one independent factor per product
    double synth_lag_step = 2.0;    // P, Q, TVAd delayed by 0, step, 2*step days
    double synth_loading = 0.8;
    double synth_market_loading = 0.4;  // shared by all products; 0 disables
    double synth_noise = 0.3;
    std::size_t synth_customers = 40;

    // [run]
    std::uint64_t seed = 20130401;
    std::filesystem::path out_dir = "chpca_out";
    unsigned threads = 0;  // 0: CHPCA_THREADS or 1
};

std::string to_ini(const RunConfig& config);

/// Unknown sections or keys and malformed values throw ParseError with the
/// line number. Keys absent from the text keep their defaults.
RunConfig parse_ini(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Effective worker count: the config value, else CHPCA_THREADS, else 1.
unsigned effective_threads(const RunConfig& config);

} // namespace chpca
