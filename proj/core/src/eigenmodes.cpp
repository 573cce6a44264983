#include "chpca/eigenmodes.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "chpca/error.hpp"
#include "chpca/io.hpp"
#include "chpca/parallel.hpp"

namespace chpca {

using cd = std::complex<double>;

ComplexCorrelation correlation(const Eigen::MatrixXcd& z, unsigned threads) {
    const Eigen::Index N = z.rows();
    const double T = static_cast<double>(z.cols());
    if (z.cols() == 0) throw Error("correlation of empty series");
    ComplexCorrelation c;
    c.matrix.resize(N, N);
    // Row-major copy so each inner product runs over contiguous memory.
    const Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows = z;
    parallel_for(static_cast<std::size_t>(N), threads, [&](std::size_t ia) {
        const auto a = static_cast<Eigen::Index>(ia);
        for (Eigen::Index b = a; b < N; ++b) {
            // sum_t z_a(t) conj(z_b(t))
            const cd s = rows.row(b).dot(rows.row(a));
            c.matrix(a, b) = s / T;
        }
    });
    for (Eigen::Index a = 0; a < N; ++a) {
        c.matrix(a, a) = cd(c.matrix(a, a).real(), 0.0);
        for (Eigen::Index b = a + 1; b < N; ++b) c.matrix(b, a) = std::conj(c.matrix(a, b));
    }
    return c;
}

ComplexCorrelation correlation(const ComplexPanel& panel, unsigned threads) {
    return correlation(panel.values, threads);
}

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solve(const ComplexCorrelation& c, int options) {
    if (c.matrix.rows() != c.matrix.cols()) throw Error("correlation matrix is not square");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(c.matrix, options);
    if (solver.info() != Eigen::Success) throw Error("Hermitian eigensolver failed to converge");
    return solver;
}

} // namespace

EigenSystem eigendecompose(const ComplexCorrelation& c) {
    const auto solver = solve(c, Eigen::ComputeEigenvectors);
    EigenSystem sys;
    sys.eigenvalues = solver.eigenvalues().reverse();
    sys.eigenvectors = solver.eigenvectors().rowwise().reverse();
    return sys;
}

EigenSystem eigendecompose(const ComplexCorrelation& c, const ComplexPanel& panel) {
    if (panel.values.rows() != c.matrix.rows()) throw Error("panel and correlation sizes differ");
    EigenSystem sys = eigendecompose(c);
    sys.mode_signals = sys.eigenvectors.adjoint() * panel.values;
    return sys;
}

Eigen::VectorXd spectrum(const ComplexCorrelation& c) {
    return solve(c, Eigen::EigenvaluesOnly).eigenvalues().reverse();
}

std::vector<double> cumulative_eigenvalues(const Eigen::VectorXd& descending) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(descending.size()));
    double acc = 0.0;
    for (Eigen::Index i = 0; i < descending.size(); ++i) {
        acc += descending(i);
        out.push_back(acc);
    }
    return out;
}

std::vector<double> cumulative_eigenvalues(const EigenSystem& sys) {
    return cumulative_eigenvalues(sys.eigenvalues);
}

EigenSystem fix_gauge(EigenSystem sys, std::span<const std::size_t> quantity_indices,
                      std::span<const std::size_t> price_indices) {
    const auto N = static_cast<std::size_t>(sys.eigenvectors.rows());
    if (quantity_indices.empty()) throw Error("fix_gauge needs at least one quantity component");
    for (std::size_t q : quantity_indices)
        if (q >= N) throw Error("quantity index out of range");
    for (std::size_t p : price_indices)
        if (p >= N) throw Error("price index out of range");

    const Eigen::Index modes = sys.eigenvectors.cols();
    sys.gauge_fixed.assign(static_cast<std::size_t>(modes), false);
    for (Eigen::Index n = 0; n < modes; ++n) {
        // Sum of |e| * unit phasor = sum of the components themselves.
        cd resultant = 0.0;
        double mass = 0.0;
        for (std::size_t q : quantity_indices) {
            resultant += sys.eigenvectors(static_cast<Eigen::Index>(q), n);
            mass += std::abs(sys.eigenvectors(static_cast<Eigen::Index>(q), n));
        }
        if (std::abs(resultant) <= 1e-12 * std::max(mass, 1e-300) || mass < 1e-14) continue;
        const cd rotation = std::conj(resultant) / std::abs(resultant);
        sys.eigenvectors.col(n) *= rotation;
        if (sys.mode_signals.rows() > n) sys.mode_signals.row(n) *= std::conj(rotation);
        sys.gauge_fixed[static_cast<std::size_t>(n)] = true;
    }
    return sys;
}

Eigen::VectorXd real_pca_spectrum(const Eigen::MatrixXd& x) {
    const double T = static_cast<double>(x.cols());
    const Eigen::MatrixXd c = (x * x.transpose()) / T;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw Error("real eigensolver failed to converge");
    return solver.eigenvalues().reverse();
}

std::vector<EigenmodeRow> eigenmode_report(const EigenSystem& sys, const std::vector<SeriesLabel>& labels,
                                           std::size_t mode, double min_magnitude) {
    if (mode >= sys.size()) throw Error("mode index out of range");
    if (labels.size() != static_cast<std::size_t>(sys.eigenvectors.rows())) {
        throw Error("label count does not match eigenvector length");
    }
    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::vector<EigenmodeRow> rows;
    for (std::size_t a = 0; a < labels.size(); ++a) {
        cd e = sys.eigenvectors(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(mode));
        if (labels[a].variable == Variable::P) e = -e;
        const double mag = std::abs(e);
        if (mag < min_magnitude) continue;
        double phase = std::fmod(std::arg(e), two_pi);
        if (phase < 0.0) phase += two_pi;
        if (phase >= two_pi) phase = 0.0;
        rows.push_back({labels[a].product, labels[a].variable, phase, mag});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const EigenmodeRow& x, const EigenmodeRow& y) {
        if (x.product != y.product) return x.product < y.product;
        return x.phase < y.phase;
    });
    return rows;
}

std::string format_eigenmode_report(const std::vector<EigenmodeRow>& rows, char delimiter) {
    std::string out = "Brand";
    for (const char* h : {"Variable", "Phase", "Abs"}) {
        out.push_back(delimiter);
        out += h;
    }
    out.push_back('\n');
    for (const auto& r : rows) {
        out += r.product;
        out.push_back(delimiter);
        out += to_string(r.variable);
        out.push_back(delimiter);
        out += format_double(r.phase);
        out.push_back(delimiter);
        out += format_double(r.magnitude);
        out.push_back('\n');
    }
    return out;
}

} // namespace chpca
