#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace additivity {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// An a x b two-way layout with exactly one finite observation per cell.
/// Rows index the levels of the first factor, columns the second.
class DataMatrix {
public:
    /// Throws DimensionError if a < 2 or b < 2 and DomainError on a
    /// non-finite cell.
    explicit DataMatrix(Matrix values,
                        std::vector<std::string> row_labels = {},
                        std::vector<std::string> col_labels = {});

    const Matrix& values() const noexcept { return values_; }
    Eigen::Index rows() const noexcept { return values_.rows(); }
    Eigen::Index cols() const noexcept { return values_.cols(); }
    double operator()(Eigen::Index i, Eigen::Index j) const { return values_(i, j); }

    const std::vector<std::string>& row_labels() const noexcept { return row_labels_; }
    const std::vector<std::string>& col_labels() const noexcept { return col_labels_; }

    DataMatrix transposed() const;

private:
    Matrix values_;
    std::vector<std::string> row_labels_;
    std::vector<std::string> col_labels_;
};

/// Least-squares fit of y_ij = mu + alpha_i + beta_j by double centering.
struct AdditiveFit {
    double grand_mean = 0.0;
    Vector row_effects;
    Vector col_effects;
    Matrix residuals;
    double rss0 = 0.0;

    Eigen::Index rows() const noexcept { return residuals.rows(); }
    Eigen::Index cols() const noexcept { return residuals.cols(); }

    double row_ss() const { return row_effects.squaredNorm(); }
    double col_ss() const { return col_effects.squaredNorm(); }

    /// Sum of squares about the grand mean: rss0 + b*sum(alpha^2) + a*sum(beta^2).
    double total_ss() const;
};

/// Decreasing eigenvalues of R R^T (kappa) and their normalized shares (omega).
/// Always holds exactly min(a,b)-1 entries, zero padded past the rank.
struct SpectrumSummary {
    Vector kappa;
    Vector omega;
};

AdditiveFit fit_additive(const DataMatrix& data);

/// Throws DegenerateSpectrumError when every residual is zero.
SpectrumSummary spectrum(const AdditiveFit& fit);

namespace detail {

// Quantities below rel * scale are treated as exact zeros. Roundoff in
// differences of O(scale) sums sits near 1e-16 * scale.
inline constexpr double kNegligibleRel = 1e-12;

inline bool negligible(double value, double scale) {
    return !(value > kNegligibleRel * scale);
}

// Absolute floor for sums of squares built from centered data; anything
// smaller is rounding noise of order (eps * |y|)^2.
double roundoff_floor(const AdditiveFit& fit);

}  // namespace detail

}  // namespace additivity
