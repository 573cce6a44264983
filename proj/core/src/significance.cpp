#include "chpca/significance.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "chpca/eigenmodes.hpp"
#include "chpca/error.hpp"
#include "chpca/io.hpp"
#include "chpca/parallel.hpp"

namespace chpca {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t kBandStream = 0x62616E64ULL << 32;

double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return std::nan("");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

struct Moments {
    double mean = 0.0;
    double sd = 0.0;
};

Moments moments(const std::vector<double>& xs) {
    Moments m;
    if (xs.empty()) return m;
    for (double x : xs) m.mean += x;
    m.mean /= static_cast<double>(xs.size());
    if (xs.size() < 2) return m;
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    return m;
}

Eigen::VectorXcd complexify_standardized(const Eigen::VectorXd& x) {
    return standardize_complex(complexify_series(x));
}

} // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

std::size_t RrsResult::significant_count() const {
    std::size_t n = 0;
    while (n < ranks.size() && ranks[n].significant) ++n;
    return n;
}

Eigen::VectorXd rotate_series(const Eigen::Ref<const Eigen::VectorXd>& x, std::size_t offset) {
    const Eigen::Index T = x.size();
    Eigen::VectorXd out(T);
    if (T == 0) return out;
    const auto k = static_cast<Eigen::Index>(offset % static_cast<std::size_t>(T));
    out.head(T - k) = x.tail(T - k);
    out.tail(k) = x.head(k);
    return out;
}

Eigen::VectorXd rotated_spectrum(const Eigen::MatrixXd& real_rows, std::span<const std::size_t> offsets) {
    const Eigen::Index N = real_rows.rows();
    if (offsets.size() != static_cast<std::size_t>(N)) throw Error("one rotation offset per series required");
    Eigen::MatrixXcd z(N, real_rows.cols());
    for (Eigen::Index i = 0; i < N; ++i) {
        const Eigen::VectorXd rotated = rotate_series(real_rows.row(i).transpose(), offsets[static_cast<std::size_t>(i)]);
        z.row(i) = complexify_standardized(rotated).transpose();
    }
    return spectrum(correlation(z));
}

RrsResult rrs_test(const ComplexPanel& panel, const RrsOptions& options) {
    const Eigen::Index N = panel.unnormalized.rows();
    const Eigen::Index T = panel.unnormalized.cols();
    if (options.n_sims < 100) throw Error("rrs needs at least 100 simulations");
    if (T < 4) throw Error("rrs needs series of length at least 4");
    if (N < 1) throw Error("rrs on an empty panel");

    const Eigen::MatrixXd real_rows = panel.unnormalized.real();
    const Eigen::VectorXd actual = spectrum(correlation(panel.values));

    Eigen::MatrixXd sims(static_cast<Eigen::Index>(options.n_sims), N);
    parallel_for(options.n_sims, options.threads, [&](std::size_t s) {
        std::mt19937_64 rng(derive_seed(options.seed, s));
        std::uniform_int_distribution<std::size_t> offset(0, static_cast<std::size_t>(T) - 1);
        std::vector<std::size_t> offsets(static_cast<std::size_t>(N));
        for (auto& o : offsets) o = offset(rng);
        sims.row(static_cast<Eigen::Index>(s)) = rotated_spectrum(real_rows, offsets).transpose();
    });

    RrsResult result;
    result.n_sims = options.n_sims;
    result.seed = options.seed;
    result.rule = options.rule;
    bool still_significant = true;
    for (Eigen::Index n = 0; n < N; ++n) {
        std::vector<double> column(static_cast<std::size_t>(options.n_sims));
        for (std::size_t s = 0; s < options.n_sims; ++s) column[s] = sims(static_cast<Eigen::Index>(s), n);
        const Moments m = moments(column);
        std::sort(column.begin(), column.end());
        RankSummary r;
        r.eigenvalue = actual(n);
        r.mean = m.mean;
        r.sd = m.sd;
        r.z_score = m.sd > 0.0 ? (r.eigenvalue - m.mean) / m.sd : std::nan("");
        r.q025 = quantile_sorted(column, 0.025);
        r.median = quantile_sorted(column, 0.5);
        r.q975 = quantile_sorted(column, 0.975);
        r.q977 = quantile_sorted(column, 0.977);
        const bool passes = options.rule == SignificanceRule::MeanPlusTwoSigma ? r.eigenvalue > m.mean + 2.0 * m.sd
                                                                               : r.eigenvalue > r.q977;
        still_significant = still_significant && passes;
        r.significant = still_significant;
        result.ranks.push_back(r);
    }
    return result;
}

std::string format_rrs_report(const RrsResult& result, char delimiter) {
    std::string out;
    if (result.n_sims < kDefaultSimulations) {
        out += "# note: reduced simulation count n_sims=" + std::to_string(result.n_sims) + " (default " +
               std::to_string(kDefaultSimulations) + ")\n";
    }
    out += "# seed=" + std::to_string(result.seed) + " rule=" +
           (result.rule == SignificanceRule::MeanPlusTwoSigma ? "mean+2sd" : "q97.7") + "\n";
    const char* header[] = {"rank", "lambda", "mu", "sigma", "z_score", "significant"};
    for (std::size_t i = 0; i < std::size(header); ++i) {
        if (i) out.push_back(delimiter);
        out += header[i];
    }
    out.push_back('\n');
    for (std::size_t n = 0; n < result.ranks.size(); ++n) {
        const auto& r = result.ranks[n];
        out += std::to_string(n + 1);
        for (double v : {r.eigenvalue, r.mean, r.sd, r.z_score}) {
            out.push_back(delimiter);
            out += format_double(v);
        }
        out.push_back(delimiter);
        out += r.significant ? "1" : "0";
        out.push_back('\n');
    }
    return out;
}

const ModeBand& ComponentBand::band_for(std::size_t mode) const {
    for (const auto& b : modes)
        if (b.mode == mode) return b;
    throw Error("no band computed for mode " + std::to_string(mode + 1));
}

ComponentBand component_bands(const ComplexPanel& panel, std::span<const std::size_t> modes,
                              const BandOptions& options) {
    if (options.n_trials < 30) throw Error("component bands need at least 30 trials");
    const Eigen::Index N = panel.values.rows();
    const Eigen::Index T = panel.values.cols();
    for (std::size_t m : modes)
        if (m >= static_cast<std::size_t>(N)) throw Error("tracked mode out of range");

    const EigenSystem original = eigendecompose(correlation(panel.values));

    // magnitudes[trial][k]; NaN marks a discarded trial.
    std::vector<std::vector<double>> magnitudes(options.n_trials, std::vector<double>(modes.size(), 0.0));
    std::vector<char> discarded(options.n_trials, 0);

    parallel_for(options.n_trials, options.threads, [&](std::size_t trial) {
        std::mt19937_64 rng(derive_seed(options.seed ^ kBandStream, trial));
        std::normal_distribution<double> gauss(0.0, 1.0);
        Eigen::VectorXd noise(T);
        for (Eigen::Index t = 0; t < T; ++t) noise(t) = gauss(rng);
        noise.array() -= noise.mean();
        noise /= std::sqrt(noise.squaredNorm() / static_cast<double>(T));

        Eigen::MatrixXcd z(N + 1, T);
        z.topRows(N) = panel.values;
        z.row(N) = complexify_standardized(noise).transpose();
        const EigenSystem sys = eigendecompose(correlation(z));

        for (std::size_t k = 0; k < modes.size(); ++k) {
            const Eigen::VectorXcd e = original.eigenvectors.col(static_cast<Eigen::Index>(modes[k]));
            double best = -1.0;
            Eigen::Index best_j = 0;
            for (Eigen::Index j = 0; j <= N; ++j) {
                const double overlap = std::abs(e.dot(sys.eigenvectors.col(j).head(N)));
                if (overlap > best) {
                    best = overlap;
                    best_j = j;
                }
            }
            if (best < options.min_overlap) {
                discarded[trial] = 1;
                return;
            }
            magnitudes[trial][k] = std::abs(sys.eigenvectors(N, best_j));
        }
    });

    ComponentBand band;
    band.n_trials = options.n_trials;
    for (char d : discarded) band.n_discarded += d ? 1 : 0;
    if (2 * band.n_discarded > options.n_trials) {
        throw Error("component bands: " + std::to_string(band.n_discarded) + " of " +
                    std::to_string(options.n_trials) + " trials failed mode matching");
    }
    for (std::size_t k = 0; k < modes.size(); ++k) {
        std::vector<double> xs;
        for (std::size_t t = 0; t < options.n_trials; ++t)
            if (!discarded[t]) xs.push_back(magnitudes[t][k]);
        const Moments m = moments(xs);
        std::sort(xs.begin(), xs.end());
        ModeBand b;
        b.mode = modes[k];
        b.mean = m.mean;
        b.sd = m.sd;
        b.threshold = m.mean + 2.0 * m.sd;
        b.median = quantile_sorted(xs, 0.5);
        b.q977 = quantile_sorted(xs, 0.977);
        band.modes.push_back(b);
    }
    return band;
}

std::string format_band_report(const ComponentBand& band, char delimiter) {
    std::string out = "# n_trials=" + std::to_string(band.n_trials) +
                      " discarded=" + std::to_string(band.n_discarded) + "\n";
    const char* header[] = {"mode", "threshold_2sigma", "mean", "sd", "median", "q977"};
    for (std::size_t i = 0; i < std::size(header); ++i) {
        if (i) out.push_back(delimiter);
        out += header[i];
    }
    out.push_back('\n');
    for (const auto& b : band.modes) {
        out += std::to_string(b.mode + 1);
        for (double v : {b.threshold, b.mean, b.sd, b.median, b.q977}) {
            out.push_back(delimiter);
            out += format_double(v);
        }
        out.push_back('\n');
    }
    return out;
}

} // namespace chpca
