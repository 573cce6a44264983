#pragma once

#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Core>

#include "chpca/panel.hpp"
#include "chpca/synth.hpp"

namespace testing_support {

inline constexpr double kPi = std::numbers::pi;

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("chpca_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline Eigen::MatrixXd gaussian_rows(Eigen::Index n, Eigen::Index t, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Eigen::MatrixXd m(n, t);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < t; ++j) m(i, j) = g(rng);
    return m;
}

inline Eigen::VectorXd tone(Eigen::Index T, double k, double shift = 0.0, bool sine = false) {
    Eigen::VectorXd x(T);
    for (Eigen::Index t = 0; t < T; ++t) {
        const double arg = 2.0 * kPi * k * (static_cast<double>(t) + shift) / static_cast<double>(T);
        x(t) = sine ? std::sin(arg) : std::cos(arg);
    }
    return x;
}

// Brute-force DFT, independent of the library's FFT.
inline Eigen::VectorXcd naive_dft(const Eigen::VectorXcd& x, int sign) {
    const auto T = x.size();
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(T);
    for (Eigen::Index k = 0; k < T; ++k)
        for (Eigen::Index t = 0; t < T; ++t)
            out(k) += x(t) * std::polar(1.0, sign * 2.0 * kPi * static_cast<double>(k * t) / static_cast<double>(T));
    return out;
}

// Reference complexification: mask the spectrum bin by bin with the naive DFT.
inline Eigen::VectorXcd reference_complexify(const Eigen::VectorXd& x) {
    const auto T = x.size();
    Eigen::VectorXcd X = naive_dft(x.cast<std::complex<double>>(), -1);
    for (Eigen::Index k = 1; k < T; ++k) {
        if (2 * k == T) continue;
        X(k) *= (2 * k < T) ? 0.0 : 2.0;
    }
    return naive_dft(X, +1) / static_cast<double>(T);
}

inline chpca::PanelSeries make_panel(const Eigen::MatrixXd& values) {
    chpca::PanelSeries p;
    p.values = values;
    for (Eigen::Index i = 0; i < values.rows(); ++i)
        p.labels.push_back({"S" + std::to_string(i), chpca::Variable::Q});
    const auto start = chpca::parse_iso_date("2013-04-01");
    for (Eigen::Index t = 0; t < values.cols(); ++t) p.days.push_back(start + std::chrono::days(static_cast<int>(t)));
    return p;
}

/// N series, the first `loaded` of which share one broadband zero-lag factor
/// with the given loading; every series gets Gaussian noise.
inline chpca::SynthSpec factor_spec(std::size_t n, std::size_t loaded, double loading, double noise_sd,
                                    std::uint64_t seed, std::size_t length = 365) {
    chpca::SynthSpec spec;
    spec.variables = {chpca::Variable::Q};
    for (std::size_t i = 0; i < n; ++i) spec.products.push_back("S" + std::to_string(i));
    spec.length = length;
    spec.noise_sd = noise_sd;
    spec.seed = seed;
    chpca::Factor f;
    f.cycles = chpca::cycle_band(1, 40);
    std::mt19937_64 rng(seed + 1000);
    std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
    for (std::size_t k = 0; k < f.cycles.size(); ++k) f.phases.push_back(u(rng));
    f.lags.assign(n, 0.0);
    f.loadings.assign(n, 0.0);
    for (std::size_t i = 0; i < loaded; ++i) f.loadings[i] = loading;
    spec.factors.push_back(f);
    return spec;
}

} // namespace testing_support
