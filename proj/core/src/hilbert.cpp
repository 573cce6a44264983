#include "chpca/hilbert.hpp"

#include <cmath>
#include <complex>

#include <unsupported/Eigen/FFT>

#include "chpca/error.hpp"
#include "chpca/parallel.hpp"

namespace chpca {

using cd = std::complex<double>;

Eigen::VectorXcd complexify_series(const Eigen::Ref<const Eigen::VectorXd>& x) {
    const Eigen::Index T = x.size();
    if (T < 4) throw Error("complexify needs at least 4 samples, got " + std::to_string(T));
    if (!x.allFinite()) throw Error("complexify: non-finite input");
    if ((x.array() == 0.0).all()) return Eigen::VectorXcd::Zero(T);

    std::vector<cd> in(static_cast<std::size_t>(T));
    for (Eigen::Index t = 0; t < T; ++t) in[static_cast<std::size_t>(t)] = cd(x(t), 0.0);
    std::vector<cd> spec;
    Eigen::FFT<double> fft;
    fft.fwd(spec, in);

    // Bin k < T/2 carries exp(+i 2pi k t/T); bin T-k carries exp(-i 2pi k t/T).
    const Eigen::Index half = T / 2;
    for (Eigen::Index k = 1; k < T; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        if (T % 2 == 0 && k == half) continue;  // Nyquist
        if (2 * k < T) {
            spec[kk] = 0.0;
        } else {
            spec[kk] *= 2.0;
        }
    }
    std::vector<cd> out;
    fft.inv(out, spec);
    Eigen::VectorXcd z(T);
    for (Eigen::Index t = 0; t < T; ++t) z(t) = out[static_cast<std::size_t>(t)];
    return z;
}

Eigen::VectorXcd standardize_complex(const Eigen::Ref<const Eigen::VectorXcd>& z, ZeroSeries zeros) {
    const double T = static_cast<double>(z.size());
    if (zeros == ZeroSeries::MapToZero && (z.array() == cd(0.0, 0.0)).all()) {
        return Eigen::VectorXcd::Zero(z.size());
    }
    const cd mean = z.mean();
    Eigen::VectorXcd centered = z.array() - mean;
    const double sd = std::sqrt(centered.squaredNorm() / T);
    const double scale = std::max(std::abs(mean), z.cwiseAbs().maxCoeff());
    if (!(sd > 1e-13 * scale) || !std::isfinite(sd)) {
        throw Error("cannot standardize constant complex series");
    }
    return centered / sd;
}

ComplexPanel complexify(const Eigen::MatrixXd& values, unsigned threads) {
    ComplexPanel out;
    const Eigen::Index N = values.rows();
    const Eigen::Index T = values.cols();
    if (T < 4) throw Error("complexify needs at least 4 samples, got " + std::to_string(T));
    out.values.resize(N, T);
    out.unnormalized.resize(N, T);
    parallel_for(static_cast<std::size_t>(N), threads, [&](std::size_t i) {
        const auto r = static_cast<Eigen::Index>(i);
        const Eigen::VectorXd row = values.row(r).transpose();
        const Eigen::VectorXcd z = complexify_series(row);
        out.unnormalized.row(r) = z.transpose();
        out.values.row(r) = standardize_complex(z).transpose();
    });
    return out;
}

ComplexPanel complexify(const PanelSeries& panel, unsigned threads) {
    ComplexPanel out;
    try {
        out = complexify(panel.values, threads);
    } catch (const Error& e) {
        // Name the first offending row for the caller.
        for (std::size_t i = 0; i < panel.labels.size(); ++i) {
            const Eigen::VectorXd row = panel.values.row(static_cast<Eigen::Index>(i)).transpose();
            try {
                standardize_complex(complexify_series(row));
            } catch (const Error& inner) {
                throw Error(panel.labels[i].str() + ": " + inner.what());
            }
        }
        throw;
    }
    out.labels = panel.labels;
    return out;
}

} // namespace chpca
