#include "additivity/modified_tukey.hpp"

#include "additivity/classic_tests.hpp"
#include "additivity/errors.hpp"
#include "additivity/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace additivity {

namespace {

constexpr double kDenominatorGuard = 1e-12;

void check_alpha(double alpha_level) {
    if (!(alpha_level > 0.0 && alpha_level < 1.0)) throw DomainError("alpha level must lie in (0, 1)");
}

Vector update_rows(const Matrix& y, double mu, const Vector& beta, double k) {
    const Vector weight = (1.0 + k * beta.array()).matrix();
    const double denom = weight.squaredNorm();
    if (denom < kDenominatorGuard) {
        throw DivisionGuardError("row update denominator sum_j (1 + k beta_j)^2 = " + std::to_string(denom));
    }
    // sum_j (y_ij - mu - beta_j) w_j
    return ((y.rowwise() - beta.transpose()).array() - mu).matrix() * weight / denom;
}

Vector update_cols(const Matrix& y, double mu, const Vector& alpha, double k) {
    const Vector weight = (1.0 + k * alpha.array()).matrix();
    const double denom = weight.squaredNorm();
    if (denom < kDenominatorGuard) {
        throw DivisionGuardError("column update denominator sum_i (1 + k alpha_i)^2 = " + std::to_string(denom));
    }
    return ((y.colwise() - alpha).array() - mu).matrix().transpose() * weight / denom;
}

double update_slope(const Matrix& y, double mu, const Vector& alpha, const Vector& beta, double scale) {
    const double denom = alpha.squaredNorm() * beta.squaredNorm();
    if (!(denom > kDenominatorGuard * scale)) {
        throw DivisionGuardError("slope update denominator sum alpha^2 * sum beta^2 collapsed");
    }
    const Matrix resid = ((y.colwise() - alpha).rowwise() - beta.transpose()).array() - mu;
    return alpha.dot(resid * beta) / denom;
}

double interaction_rss(const Matrix& y, double mu, const InteractionStage& s) {
    Matrix e = y;
    e.array() -= mu;
    e.colwise() -= s.alpha;
    e.rowwise() -= s.beta.transpose();
    e -= s.k * s.alpha * s.beta.transpose();
    return e.squaredNorm();
}

bool exact_fit(const InteractionFit& fit, const AdditiveFit& additive) {
    return fit.rss <= detail::roundoff_floor(additive) || detail::negligible(fit.rss, fit.rss0);
}

struct Observed {
    AdditiveFit additive;
    InteractionFit fit;
};

Observed observe(const DataMatrix& data, const FitOptions& options) {
    Observed o{fit_additive(data), {}};
    o.fit = fit_interaction(data.values(), o.additive, options);
    return o;
}

Matrix additive_part(const AdditiveFit& f) {
    Matrix m = Matrix::Constant(f.rows(), f.cols(), f.grand_mean);
    m.colwise() += f.row_effects;
    m.rowwise() += f.col_effects.transpose();
    return m;
}

}  // namespace

InteractionFit fit_interaction(const DataMatrix& data, const FitOptions& options) {
    return fit_interaction(data.values(), fit_additive(data), options);
}

InteractionFit fit_interaction(const Matrix& y, const AdditiveFit& additive, const FitOptions& options) {
    const auto a = y.rows();
    const auto b = y.cols();
    const auto dof = a * b - a - b;
    if (dof < 1) {
        throw InsufficientDofError("modified Tukey fit needs ab - a - b >= 1; layout is " + std::to_string(a) + "x" +
                                   std::to_string(b));
    }
    if (options.iterations < 1) throw DomainError("iteration count must be >= 1");

    const double row_ss = additive.row_ss();
    const double col_ss = additive.col_ss();
    const double floor = detail::roundoff_floor(additive);
    if (row_ss <= floor || col_ss <= floor) {
        throw DegenerateDataError("interaction fit undefined: row or column effects are all zero");
    }

    InteractionFit fit;
    fit.grand_mean = additive.grand_mean;
    fit.rss0 = additive.rss0;
    fit.residual_dof = static_cast<int>(dof);
    fit.stage0.alpha = additive.row_effects;
    fit.stage0.beta = additive.col_effects;
    fit.stage0.k = additive.row_effects.dot(additive.residuals * additive.col_effects) / (row_ss * col_ss);

    const double mu = fit.grand_mean;
    const double slope_scale = row_ss * col_ss;
    InteractionStage current = fit.stage0;
    double rss = interaction_rss(y, mu, current);
    for (int n = 1; n <= options.iterations; ++n) {
        InteractionStage next;
        if (options.mode == UpdateMode::sequential) {
            next.alpha = update_rows(y, mu, current.beta, current.k);
            next.beta = update_cols(y, mu, next.alpha, current.k);
            next.k = update_slope(y, mu, next.alpha, next.beta, slope_scale);
        } else {
            next.alpha = update_rows(y, mu, current.beta, current.k);
            next.beta = update_cols(y, mu, current.alpha, current.k);
            next.k = update_slope(y, mu, current.alpha, current.beta, slope_scale);
        }
        const double next_rss = interaction_rss(y, mu, next);
        current = std::move(next);
        fit.iterations_run = n;
        const double change = std::abs(rss - next_rss);
        rss = next_rss;
        if (n > 1 && change < 1e-12 * fit.rss0) break;
    }
    fit.stage1 = std::move(current);
    fit.rss = rss;
    fit.s2 = rss / static_cast<double>(dof);
    return fit;
}

TestOutcome modified_tukey_test(const DataMatrix& data, double alpha_level, const FitOptions& options) {
    check_alpha(alpha_level);
    const Observed o = observe(data, options);
    const InteractionFit& fit = o.fit;
    if (fit.rss0 <= detail::roundoff_floor(o.additive)) {
        throw DegenerateDataError("modified Tukey test undefined: data are exactly additive (RSS0 = 0)");
    }

    const FParams df(1, fit.residual_dof);
    const double dof = fit.residual_dof;
    TestOutcome out;
    out.method = Method::modified_tukey;
    out.alpha_level = alpha_level;
    out.rejection_side = RejectionSide::high;
    out.reference = df;
    out.critical_value = f_quantile(1.0 - alpha_level, df);
    if (exact_fit(fit, o.additive)) {
        out.statistic = std::numeric_limits<double>::infinity();
        out.reject = true;
        out.p_value = 0.0;
        out.warnings.push_back("interaction model fits exactly (RSS = 0)");
        return out;
    }
    out.statistic = (fit.rss0 - fit.rss) / (fit.rss / dof);
    out.reject = fit.rss0 > fit.rss * (1.0 + out.critical_value / dof);
    out.p_value = f_sf(std::max(out.statistic, 0.0), df);
    return out;
}

namespace {

void check_config(const ResamplingConfig& config, Adjustment expected) {
    if (config.kind != expected) throw DomainError("resampling config has the wrong kind");
    if (config.n_samples < 100) throw DomainError("resampling needs at least 100 samples");
}

// Degenerate replicates are recorded as +inf: never below the observed value
// and never lowering the critical value.
constexpr double kDegenerateSample = std::numeric_limits<double>::infinity();

void check_degeneracy(std::size_t degenerate, std::size_t n) {
    if (100 * degenerate > n) {
        throw ResamplingDegeneracyError(std::to_string(degenerate) + " of " + std::to_string(n) +
                                        " resampled datasets were degenerate (limit 1%)");
    }
}

ResamplingReference reference_of(const ResamplingConfig& config, std::size_t degenerate) {
    return ResamplingReference{config.kind, config.n_samples, config.stream.seed(), config.stream.stream_id(),
                               degenerate};
}

}  // namespace

TestOutcome permutation_test(const DataMatrix& data, double alpha_level, const ResamplingConfig& config) {
    check_alpha(alpha_level);
    check_config(config, Adjustment::permutation);
    const Observed o = observe(data, config.fit);
    if (o.fit.rss0 <= detail::roundoff_floor(o.additive)) {
        throw DegenerateDataError("modified Tukey test undefined: data are exactly additive (RSS0 = 0)");
    }
    const auto statistic = [&config](const InteractionFit& f, const AdditiveFit& additive) {
        if (config.permutation_statistic == PermutationStatistic::difference) return f.rss0 - f.rss;
        if (exact_fit(f, additive)) return std::numeric_limits<double>::infinity();
        return (f.rss0 - f.rss) / (f.rss / f.residual_dof);
    };
    const double observed = statistic(o.fit, o.additive);

    const Matrix base = additive_part(o.additive);
    const Matrix& resid = o.additive.residuals;
    const auto a = base.rows();
    const auto b = base.cols();
    const auto cells = static_cast<std::size_t>(a * b);

    std::vector<double> sampled(config.n_samples);
    std::vector<char> degenerate(config.n_samples, 0);
    parallel_for(config.n_samples, config.workers, [&](std::size_t t) {
        RngStream rs = config.stream.substream(t);
        const std::vector<std::size_t> perm = sample_permutation(rs, cells);
        Matrix y(a, b);
        for (Eigen::Index i = 0; i < a; ++i) {
            for (Eigen::Index j = 0; j < b; ++j) {
                const std::size_t src = perm[static_cast<std::size_t>(i * b + j)];
                y(i, j) = base(i, j) + resid(static_cast<Eigen::Index>(src) / b, static_cast<Eigen::Index>(src) % b);
            }
        }
        try {
            const AdditiveFit additive = fit_additive(DataMatrix(y));
            sampled[t] = statistic(fit_interaction(y, additive, config.fit), additive);
        } catch (const Error&) {
            sampled[t] = kDegenerateSample;
            degenerate[t] = 1;
        }
    });
    const auto n_degenerate = static_cast<std::size_t>(std::count(degenerate.begin(), degenerate.end(), 1));
    check_degeneracy(n_degenerate, config.n_samples);

    std::sort(sampled.begin(), sampled.end());
    TestOutcome out;
    out.method = Method::modified_tukey;
    out.adjustment = Adjustment::permutation;
    out.alpha_level = alpha_level;
    out.rejection_side = RejectionSide::high;
    out.statistic = observed;
    out.critical_value = sampled[high_side_rank(alpha_level, config.n_samples) - 1];
    out.reject = observed > out.critical_value;
    const auto at_least = static_cast<std::size_t>(sampled.end() - std::lower_bound(sampled.begin(), sampled.end(), observed));
    out.p_value = (1.0 + static_cast<double>(at_least)) / (static_cast<double>(config.n_samples) + 1.0);
    out.reference = reference_of(config, n_degenerate);
    return out;
}

TestOutcome bootstrap_test(const DataMatrix& data, double alpha_level, const ResamplingConfig& config) {
    check_alpha(alpha_level);
    check_config(config, Adjustment::bootstrap);
    const Observed o = observe(data, config.fit);
    const double observed = std::abs(o.fit.stage1.k);

    TestOutcome out;
    out.method = Method::modified_tukey;
    out.adjustment = Adjustment::bootstrap;
    out.alpha_level = alpha_level;
    out.rejection_side = RejectionSide::high;
    out.statistic = observed;

    if (o.fit.rss0 <= detail::roundoff_floor(o.additive)) {
        throw DegenerateDataError("modified Tukey test undefined: data are exactly additive (RSS0 = 0)");
    }
    if (exact_fit(o.fit, o.additive)) {
        out.critical_value = 0.0;
        out.reject = observed > out.critical_value;
        out.p_value = 0.0;
        out.reference = reference_of(config, 0);
        out.warnings.push_back("interaction model fits exactly (s^2 = 0); rejecting without resampling");
        return out;
    }

    const double sd = std::sqrt(o.fit.s2);
    const Matrix base = additive_part(o.additive);
    const auto a = base.rows();
    const auto b = base.cols();

    std::vector<double> sampled(config.n_samples);
    std::vector<char> degenerate(config.n_samples, 0);
    parallel_for(config.n_samples, config.workers, [&](std::size_t t) {
        RngStream rs = config.stream.substream(t);
        Matrix y(a, b);
        for (Eigen::Index i = 0; i < a; ++i) {
            for (Eigen::Index j = 0; j < b; ++j) y(i, j) = base(i, j) + sd * rs.normal();
        }
        try {
            const InteractionFit f = fit_interaction(y, fit_additive(DataMatrix(y)), config.fit);
            sampled[t] = std::abs(f.stage1.k);
        } catch (const Error&) {
            sampled[t] = kDegenerateSample;
            degenerate[t] = 1;
        }
    });
    const auto n_degenerate = static_cast<std::size_t>(std::count(degenerate.begin(), degenerate.end(), 1));
    check_degeneracy(n_degenerate, config.n_samples);

    std::sort(sampled.begin(), sampled.end());
    const std::size_t n = config.n_samples;
    const auto below = static_cast<std::size_t>(std::lower_bound(sampled.begin(), sampled.end(), observed) - sampled.begin());
    const auto threshold = static_cast<std::size_t>(std::floor((1.0 - alpha_level) * static_cast<double>(n) + 1e-9));
    out.reject = below > threshold;
    // below > threshold  <=>  sampled[threshold] < observed
    out.critical_value = threshold < n ? sampled[threshold] : std::numeric_limits<double>::infinity();
    out.p_value = (1.0 + static_cast<double>(n - below)) / (static_cast<double>(n) + 1.0);
    out.reference = reference_of(config, n_degenerate);
    return out;
}

Adjustment auto_adjustment(Eigen::Index a, Eigen::Index b) {
    return std::min(a, b) < 20 ? Adjustment::permutation : Adjustment::none;
}

}  // namespace additivity
