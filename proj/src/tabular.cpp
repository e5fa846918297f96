#include "additivity/tabular.hpp"

#include "additivity/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>

namespace additivity {

DataMatrix::DataMatrix(Matrix values, std::vector<std::string> row_labels,
                       std::vector<std::string> col_labels)
    : values_(std::move(values)), row_labels_(std::move(row_labels)), col_labels_(std::move(col_labels)) {
    if (values_.rows() < 2 || values_.cols() < 2) {
        throw DimensionError("two-way layout needs at least 2 rows and 2 columns, got " +
                             std::to_string(values_.rows()) + "x" + std::to_string(values_.cols()));
    }
    if (!values_.allFinite()) {
        throw DomainError("every cell of the layout must be a finite number");
    }
    if (!row_labels_.empty() && static_cast<Eigen::Index>(row_labels_.size()) != values_.rows()) {
        throw DimensionError("row label count does not match the number of rows");
    }
    if (!col_labels_.empty() && static_cast<Eigen::Index>(col_labels_.size()) != values_.cols()) {
        throw DimensionError("column label count does not match the number of columns");
    }
}

DataMatrix DataMatrix::transposed() const {
    return DataMatrix(values_.transpose(), col_labels_, row_labels_);
}

double AdditiveFit::total_ss() const {
    return rss0 + static_cast<double>(cols()) * row_ss() + static_cast<double>(rows()) * col_ss();
}

namespace detail {

double roundoff_floor(const AdditiveFit& fit) {
    const double n = static_cast<double>(fit.rows() * fit.cols());
    const double raw_ss = fit.total_ss() + n * fit.grand_mean * fit.grand_mean;
    return 1e-24 * raw_ss;
}

}  // namespace detail

AdditiveFit fit_additive(const DataMatrix& data) {
    const Matrix& y = data.values();
    AdditiveFit fit;
    fit.grand_mean = y.mean();
    fit.row_effects = y.rowwise().mean().array() - fit.grand_mean;
    fit.col_effects = y.colwise().mean().transpose().array() - fit.grand_mean;
    fit.residuals = y;
    fit.residuals.colwise() -= fit.row_effects;
    fit.residuals.rowwise() -= fit.col_effects.transpose();
    fit.residuals.array() -= fit.grand_mean;
    fit.rss0 = fit.residuals.squaredNorm();
    return fit;
}

SpectrumSummary spectrum(const AdditiveFit& fit) {
    const Matrix& r = fit.residuals;
    const Eigen::Index len = std::min(r.rows(), r.cols()) - 1;

    // Same nonzero spectrum either way; factor the smaller Gram matrix.
    const Matrix gram = r.rows() <= r.cols() ? Matrix(r * r.transpose()) : Matrix(r.transpose() * r);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(gram, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw DegenerateSpectrumError("symmetric eigensolver failed to converge");
    }

    Vector eig = solver.eigenvalues();  // ascending
    std::sort(eig.begin(), eig.end(), std::greater<>());
    const double top = eig.size() > 0 ? std::abs(eig(0)) : 0.0;
    const double clamp = top * 1e-12;

    SpectrumSummary out;
    out.kappa = Vector::Zero(len);
    for (Eigen::Index i = 0; i < len && i < eig.size(); ++i) {
        out.kappa(i) = eig(i) > clamp ? eig(i) : 0.0;
    }
    const double total = out.kappa.sum();
    if (!(total > 0.0) || fit.rss0 <= detail::roundoff_floor(fit)) {
        throw DegenerateSpectrumError("residual matrix is zero; omega spectrum is undefined");
    }
    out.omega = out.kappa / total;
    return out;
}

}  // namespace additivity
