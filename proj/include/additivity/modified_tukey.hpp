#pragma once

#include "additivity/distributions.hpp"
#include "additivity/outcome.hpp"
#include "additivity/tabular.hpp"

namespace additivity {

/// How the three coordinate updates of one iteration see each other.
enum class UpdateMode {
    sequential,  // alpha, then beta with the new alpha, then k with both
    snapshot,    // every update reads the previous iteration's values
};

struct FitOptions {
    /// One iteration is the test's definition; more iterations stop early
    /// once |delta RSS| < 1e-12 * RSS0.
    int iterations = 1;
    UpdateMode mode = UpdateMode::sequential;
};

/// Row effects, column effects and interaction slope of
/// y_ij = mu + alpha_i + beta_j + k alpha_i beta_j.
struct InteractionStage {
    Vector alpha;
    Vector beta;
    double k = 0.0;
};

struct InteractionFit {
    double grand_mean = 0.0;     // held at ybar.. throughout
    InteractionStage stage0;     // additive estimates plus Tukey's slope
    InteractionStage stage1;     // estimates after the last iteration
    double rss = 0.0;            // of the stage1 model
    double rss0 = 0.0;           // of the additive model
    double s2 = 0.0;             // rss / (ab - a - b)
    int iterations_run = 0;
    int residual_dof = 0;        // ab - a - b
};

/// Coordinate-wise least-squares fit of the multiplicative interaction model
/// started from the additive fit.
///
/// Throws InsufficientDofError when ab - a - b < 1, DegenerateDataError when
/// the row or column effects vanish, and DivisionGuardError when an update
/// denominator collapses.
InteractionFit fit_interaction(const DataMatrix& data, const FitOptions& options = {});
InteractionFit fit_interaction(const Matrix& y, const AdditiveFit& additive, const FitOptions& options = {});

/// RSS0 > RSS * (1 + F_{1,ab-a-b}(1-alpha) / (ab-a-b)). The reported
/// statistic is (RSS0 - RSS) / (RSS / (ab-a-b)); an exact fit (RSS = 0)
/// rejects with an infinite statistic.
TestOutcome modified_tukey_test(const DataMatrix& data, double alpha_level, const FitOptions& options = {});

/// Statistic compared against its permutation distribution.
enum class PermutationStatistic {
    f_ratio,     // (RSS0 - RSS) / (RSS / (ab - a - b)), unaffected by the
                 // variance lost when permuted residuals are re-centered
    difference,  // RSS0 - RSS
};

struct ResamplingConfig {
    Adjustment kind = Adjustment::permutation;
    PermutationStatistic permutation_statistic = PermutationStatistic::f_ratio;
    std::size_t n_samples = 1000;
    RngStream stream;
    unsigned workers = 0;
    FitOptions fit;
};

/// Rebuilds the data from the additive fit plus a uniform permutation of all
/// a*b residual cells and compares the observed statistic against the
/// ceil((1-alpha) N)-th order statistic of the permuted values.
TestOutcome permutation_test(const DataMatrix& data, double alpha_level, const ResamplingConfig& config);

/// Parametric bootstrap on residuals: N(0, s^2) errors around the additive
/// fit, statistic |k1|; rejects when more than (1-alpha) N sampled
/// statistics lie strictly below the observed one.
TestOutcome bootstrap_test(const DataMatrix& data, double alpha_level, const ResamplingConfig& config);

/// Permutation when min(a, b) < 20, none otherwise.
Adjustment auto_adjustment(Eigen::Index a, Eigen::Index b);

}  // namespace additivity
