#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "chpca/hilbert.hpp"
#include "chpca/panel.hpp"

namespace chpca {

/// C = (1/T) Z Z^H over standardized complex rows. Hermitian by
/// construction, unit diagonal, entries bounded by 1 in modulus.
struct ComplexCorrelation {
    Eigen::MatrixXcd matrix;

    std::size_t size() const { return static_cast<std::size_t>(matrix.rows()); }
};

ComplexCorrelation correlation(const ComplexPanel& panel, unsigned threads = 1);
ComplexCorrelation correlation(const Eigen::MatrixXcd& standardized_rows, unsigned threads = 1);

/// Eigenmodes of the complex correlation matrix.
///
/// Eigenvalues are sorted descending. Column n of `eigenvectors` is e_n and
/// row n of `mode_signals` is s_n(t) = sum_a conj(e_n[a]) z_a(t), so that
/// z(t) = sum_n s_n(t) e_n and lambda_n = (1/T) sum_t |s_n(t)|^2.
struct EigenSystem {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXcd eigenvectors;   // N x N
    Eigen::MatrixXcd mode_signals;   // N x T, may be empty when no panel was supplied
    std::vector<bool> gauge_fixed;   // per mode; empty before fix_gauge

    std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }
};

/// Hermitian eigendecomposition; mode signals are projected from `panel`.
EigenSystem eigendecompose(const ComplexCorrelation& c, const ComplexPanel& panel);
/// Eigenvectors and eigenvalues only.
EigenSystem eigendecompose(const ComplexCorrelation& c);

/// Descending eigenvalues without eigenvectors.
Eigen::VectorXd spectrum(const ComplexCorrelation& c);

/// L(n) = lambda_1 + ... + lambda_n.
std::vector<double> cumulative_eigenvalues(const EigenSystem& sys);
std::vector<double> cumulative_eigenvalues(const Eigen::VectorXd& descending);

/// Rotates each eigenvector by a unit phase so that the magnitude-weighted
/// circular mean phase of its quantity components is zero; mode signals are
/// counter-rotated so the expansion is unchanged. Modes whose quantity
/// components all vanish are left as is and flagged in `gauge_fixed`.
/// `price_indices` are only checked for range here; the pi flip of prices is
/// applied by eigenmode_report.
EigenSystem fix_gauge(EigenSystem sys, std::span<const std::size_t> quantity_indices,
                      std::span<const std::size_t> price_indices);

/// Descending eigenvalues of the real correlation matrix of a standardized
/// panel (ordinary PCA baseline).
Eigen::VectorXd real_pca_spectrum(const Eigen::MatrixXd& standardized_rows);

struct EigenmodeRow {
    std::string product;
    Variable variable = Variable::Q;
    double phase = 0.0;      // [0, 2pi); prices shifted by pi
    double magnitude = 0.0;
};

/// Per-component table of one mode, grouped by product and ordered by phase
/// within a product. Components with magnitude below `min_magnitude` are
/// omitted.
std::vector<EigenmodeRow> eigenmode_report(const EigenSystem& sys, const std::vector<SeriesLabel>& labels,
                                           std::size_t mode, double min_magnitude = 0.0);

std::string format_eigenmode_report(const std::vector<EigenmodeRow>& rows, char delimiter = ',');

} // namespace chpca
