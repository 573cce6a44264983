#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "chpca/panel.hpp"

namespace chpca {

/// Complexified panel under the clockwise convention: cos(wt) maps to
/// exp(-i w t) and sin(wt) to i exp(-i w t).
struct ComplexPanel {
    static constexpr std::string_view kConvention = "cos->exp(-iwt)";

    std::vector<SeriesLabel> labels;
    Eigen::MatrixXcd values;        // N x T; complex mean 0, mean |z|^2 = 1 per row
    Eigen::MatrixXcd unnormalized;  // N x T; real part equals the source rows

    std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t length() const { return static_cast<std::size_t>(values.cols()); }
};

/// Frequency-domain complexification of one real series, before
/// normalization: positive-frequency bins are zeroed, negative-frequency
/// bins doubled, DC and (even T) Nyquist kept as is. Equivalently
/// z = x - i H[x] with H[cos] = sin. Requires T >= 4 and finite input.
Eigen::VectorXcd complexify_series(const Eigen::Ref<const Eigen::VectorXd>& x);

enum class ZeroSeries {
    Reject,    // an all-zero series is an error like any other constant one
    MapToZero, // an all-zero series stays all zero
};

/// Subtracts the complex mean and scales so that mean |z|^2 = 1. Throws
/// chpca::Error for a constant series (after mean removal) unless the raw
/// input was all zero and `zeros == MapToZero`.
Eigen::VectorXcd standardize_complex(const Eigen::Ref<const Eigen::VectorXcd>& z,
                                     ZeroSeries zeros = ZeroSeries::Reject);

/// Complexifies and re-standardizes every row of a standardized panel.
ComplexPanel complexify(const PanelSeries& panel, unsigned threads = 1);

/// Same, from a bare N x T real matrix (labels left empty).
ComplexPanel complexify(const Eigen::MatrixXd& values, unsigned threads = 1);

} // namespace chpca
