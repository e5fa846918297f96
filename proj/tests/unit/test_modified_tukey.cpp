#include "additivity/classic_tests.hpp"
#include "additivity/errors.hpp"
#include "additivity/modified_tukey.hpp"
#include "test_util.hpp"

#include <doctest.h>

using namespace additivity;
using testutil::to_data;

namespace {

ResamplingConfig resampling(Adjustment kind, std::uint64_t seed, std::size_t n = 200, unsigned workers = 1) {
    ResamplingConfig cfg;
    cfg.kind = kind;
    cfg.n_samples = n;
    cfg.stream = RngStream(seed, 0);
    cfg.workers = workers;
    return cfg;
}

// Noisy Tukey-model layout with centered effects.
oracle::Grid noisy_tukey(std::size_t a, std::size_t b, double k, std::uint64_t seed, double noise = 0.3) {
    oracle::Grid e = oracle::random_grid(a, b, seed, noise);
    std::vector<double> alpha(a), beta(b);
    for (std::size_t i = 0; i < a; ++i) alpha[i] = static_cast<double>(i) - 0.5 * static_cast<double>(a - 1);
    for (std::size_t j = 0; j < b; ++j) beta[j] = 0.4 * static_cast<double>(j) - 0.2 * static_cast<double>(b - 1);
    const oracle::Grid y = testutil::tukey_model(alpha, beta, k, 2.0);
    for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = 0; j < b; ++j) e[i][j] += y[i][j];
    return e;
}

}  // namespace

TEST_CASE("one-pass fit matches the direct oracle") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const std::size_t a = 3 + seed % 6;
        const std::size_t b = 3 + (seed * 3) % 10;
        const oracle::Grid y = oracle::random_grid(a, b, seed * 17);
        const oracle::ModifiedFit ref = oracle::modified(y);
        const InteractionFit fit = fit_interaction(to_data(y));
        CHECK(oracle::rel_diff(fit.stage0.k, ref.k0) < 1e-9);
        CHECK(oracle::rel_diff(fit.stage1.k, ref.k1) < 1e-9);
        CHECK(oracle::rel_diff(fit.rss0, ref.rss0) < 1e-9);
        CHECK(oracle::rel_diff(fit.rss, ref.rss) < 1e-9);
        for (std::size_t i = 0; i < a; ++i)
            CHECK(oracle::rel_diff(fit.stage1.alpha(static_cast<Eigen::Index>(i)), ref.alpha1[i]) < 1e-9);
        for (std::size_t j = 0; j < b; ++j)
            CHECK(oracle::rel_diff(fit.stage1.beta(static_cast<Eigen::Index>(j)), ref.beta1[j]) < 1e-9);
        const TestOutcome o = modified_tukey_test(to_data(y), 0.05);
        CHECK(oracle::rel_diff(o.statistic, ref.f) < 1e-9);
        CHECK(fit.residual_dof == static_cast<int>(a * b - a - b));
    }
}

TEST_CASE("both forms of the initial slope agree") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const oracle::Grid y = oracle::random_grid(4 + seed % 3, 5 + seed % 4, seed, 2.0);
        CHECK(oracle::rel_diff(oracle::k0_simplified(y), oracle::modified(y).k0) < 1e-10);
        CHECK(oracle::rel_diff(fit_interaction(to_data(y)).stage0.k, oracle::k0_simplified(y)) < 1e-10);
    }
}

TEST_CASE("noiseless multiplicative data are recovered exactly") {
    const std::vector<double> alpha{-1.5, -0.5, 0.5, 1.5};
    const std::vector<double> beta{-2.0, -1.0, 0.0, 1.0, 2.0};
    const double k = 0.35;
    const InteractionFit fit = fit_interaction(to_data(testutil::tukey_model(alpha, beta, k, 4.0)));
    CHECK(fit.stage0.k == doctest::Approx(k).epsilon(1e-12));
    CHECK(fit.stage1.k == doctest::Approx(k).epsilon(1e-12));
    for (std::size_t i = 0; i < alpha.size(); ++i)
        CHECK(fit.stage1.alpha(static_cast<Eigen::Index>(i)) == doctest::Approx(alpha[i]).epsilon(1e-12));
    for (std::size_t j = 0; j < beta.size(); ++j)
        CHECK(fit.stage1.beta(static_cast<Eigen::Index>(j)) == doctest::Approx(beta[j]).epsilon(1e-12));
    CHECK(fit.rss < 1e-20 * fit.rss0);

    const TestOutcome o = modified_tukey_test(to_data(testutil::tukey_model(alpha, beta, k, 4.0)), 0.05);
    CHECK(std::isinf(o.statistic));
    CHECK(o.reject);
}

TEST_CASE("additive data with orthogonal residuals are a fixed point") {
    // Residual u v^T with u orthogonal to alpha gives k0 = 0.
    const std::vector<double> alpha{-1.0, 0.0, 1.0};
    const std::vector<double> beta{-1.0, 0.5, 0.5, 0.0};
    const std::vector<double> u{1.0, -2.0, 1.0};
    const std::vector<double> v{1.0, -1.0, 2.0, -2.0};
    oracle::Grid y = testutil::tukey_model(alpha, beta, 0.0, 1.0);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 4; ++j) y[i][j] += 0.2 * u[i] * v[j];
    const InteractionFit fit = fit_interaction(to_data(y));
    CHECK(std::abs(fit.stage0.k) < 1e-14);
    CHECK(std::abs(fit.stage1.k) < 1e-14);
    CHECK((fit.stage1.alpha - fit.stage0.alpha).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((fit.stage1.beta - fit.stage0.beta).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(oracle::rel_diff(fit.rss, fit.rss0) < 1e-12);
    CHECK_FALSE(modified_tukey_test(to_data(y), 0.05).reject);
}

TEST_CASE("exactly additive data are degenerate") {
    const auto y = testutil::tukey_model({-1, 0, 1}, {2, -1, -1, 0}, 0.0, 5.0);
    CHECK_THROWS_AS(modified_tukey_test(to_data(y), 0.05), DegenerateDataError);
    CHECK_THROWS_AS(permutation_test(to_data(y), 0.05, resampling(Adjustment::permutation, 1)), DegenerateDataError);
    CHECK_THROWS_AS(bootstrap_test(to_data(y), 0.05, resampling(Adjustment::bootstrap, 1)), DegenerateDataError);
}

TEST_CASE("layout and option validation") {
    CHECK_THROWS_AS(fit_interaction(testutil::grid({{1, 2}, {3, 5}})), InsufficientDofError);
    CHECK_NOTHROW(fit_interaction(testutil::grid({{1, 2, 4}, {3, 5, 4.5}})));
    FitOptions bad;
    bad.iterations = 0;
    CHECK_THROWS_AS(fit_interaction(to_data(oracle::random_grid(4, 4, 1)), bad), DomainError);
    CHECK_THROWS_AS(fit_interaction(testutil::grid({{1, 2, 4}, {1, 2, 4}, {1, 2, 4}})), DegenerateDataError);
    CHECK_THROWS_AS(modified_tukey_test(to_data(oracle::random_grid(4, 4, 1)), 0.0), DomainError);
    CHECK_THROWS_AS(permutation_test(to_data(oracle::random_grid(4, 4, 1)), 0.05,
                                     resampling(Adjustment::bootstrap, 1)),
                    DomainError);
    CHECK_THROWS_AS(permutation_test(to_data(oracle::random_grid(4, 4, 1)), 0.05,
                                     resampling(Adjustment::permutation, 1, 10)),
                    DomainError);
}

TEST_CASE("RSS never exceeds RSS0 and decreases with more iterations") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const oracle::Grid y = (seed % 2 == 0) ? oracle::random_grid(3 + seed % 7, 3 + seed % 9, seed)
                                               : noisy_tukey(3 + seed % 7, 3 + seed % 9, 0.5, seed);
        const DataMatrix d = to_data(y);
        const InteractionFit one = fit_interaction(d);
        CHECK(one.rss <= one.rss0 * (1.0 + 1e-12));
        FitOptions more;
        more.iterations = 25;
        const InteractionFit many = fit_interaction(d, more);
        CHECK(many.rss <= one.rss * (1.0 + 1e-12));
        CHECK(many.iterations_run >= 1);
        CHECK(many.iterations_run <= 25);
        CHECK(many.s2 == doctest::Approx(many.rss / many.residual_dof));
    }
}

TEST_CASE("snapshot updates keep the initial slope after one iteration") {
    const DataMatrix d = to_data(noisy_tukey(5, 6, 0.8, 4));
    FitOptions snap;
    snap.mode = UpdateMode::snapshot;
    const InteractionFit s = fit_interaction(d, snap);
    const InteractionFit q = fit_interaction(d);
    CHECK(s.stage1.k == doctest::Approx(s.stage0.k).epsilon(1e-12));
    CHECK(s.stage1.k != q.stage1.k);
}

TEST_CASE("decision equals the statistic exceeding the F quantile") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const std::size_t a = 4 + seed % 5, b = 4 + seed % 6;
        const DataMatrix d = to_data(noisy_tukey(a, b, 0.05 * static_cast<double>(seed % 8), seed, 1.0));
        const TestOutcome o = modified_tukey_test(d, 0.05);
        REQUIRE(std::holds_alternative<FParams>(o.reference));
        const FParams f = std::get<FParams>(o.reference);
        CHECK(f.df1 == 1);
        CHECK(f.df2 == static_cast<int>(a * b - a - b));
        CHECK(o.critical_value == doctest::Approx(f_quantile(0.95, f)));
        CHECK(o.reject == (o.statistic > o.critical_value));
        REQUIRE(o.p_value.has_value());
        CHECK((*o.p_value < 0.05) == o.reject);
    }
}

TEST_CASE("scale equivariance: k scales by 1/c and decisions are unchanged") {
    for (double c : {0.01, 0.5, 3.0, 250.0}) {
        const oracle::Grid y = noisy_tukey(6, 7, 0.3, 21);
        const DataMatrix d = to_data(y);
        const DataMatrix scaled(Matrix((c * d.values().array() - 7.0).matrix()));
        const InteractionFit f = fit_interaction(d), fs = fit_interaction(scaled);
        CHECK(oracle::rel_diff(fs.stage0.k, f.stage0.k / c) < 1e-9);
        CHECK(oracle::rel_diff(fs.stage1.k, f.stage1.k / c) < 1e-9);
        CHECK(oracle::rel_diff(fs.rss, c * c * f.rss) < 1e-9);
        const TestOutcome o = modified_tukey_test(d, 0.05), os = modified_tukey_test(scaled, 0.05);
        CHECK(oracle::rel_diff(os.statistic, o.statistic) < 1e-9);
        CHECK(os.reject == o.reject);
        CHECK(permutation_test(d, 0.05, resampling(Adjustment::permutation, 5)).reject ==
              permutation_test(scaled, 0.05, resampling(Adjustment::permutation, 5)).reject);
        CHECK(bootstrap_test(d, 0.05, resampling(Adjustment::bootstrap, 5)).reject ==
              bootstrap_test(scaled, 0.05, resampling(Adjustment::bootstrap, 5)).reject);
    }
}

TEST_CASE("permutation test is deterministic and independent of the worker count") {
    const DataMatrix d = to_data(noisy_tukey(5, 6, 0.2, 8, 1.0));
    const TestOutcome p1 = permutation_test(d, 0.05, resampling(Adjustment::permutation, 42, 300, 1));
    const TestOutcome p2 = permutation_test(d, 0.05, resampling(Adjustment::permutation, 42, 300, 3));
    CHECK(p1.statistic == p2.statistic);
    CHECK(p1.critical_value == p2.critical_value);
    CHECK(p1.p_value == p2.p_value);
    CHECK(p1.reject == (p1.statistic > p1.critical_value));
    CHECK(p1.adjustment == Adjustment::permutation);
    REQUIRE(std::holds_alternative<ResamplingReference>(p1.reference));
    CHECK(std::get<ResamplingReference>(p1.reference).n_samples == 300);
    const InteractionFit fit = fit_interaction(d);
    CHECK(p1.statistic == doctest::Approx(modified_tukey_test(d, 0.05).statistic));
    ResamplingConfig raw = resampling(Adjustment::permutation, 42, 300, 2);
    raw.permutation_statistic = PermutationStatistic::difference;
    const TestOutcome pd = permutation_test(d, 0.05, raw);
    CHECK(pd.statistic == doctest::Approx(fit.rss0 - fit.rss));
    CHECK(pd.reject == (pd.statistic > pd.critical_value));
    const TestOutcome other = permutation_test(d, 0.05, resampling(Adjustment::permutation, 43, 300, 1));
    CHECK(other.critical_value != p1.critical_value);
}

TEST_CASE("re-centering permuted residuals shrinks their sum of squares") {
    // Expected factor (a-1)(b-1)/(ab-1); the F-ratio statistic is immune to it.
    const DataMatrix d = to_data(oracle::random_grid(6, 8, 12));
    const AdditiveFit f = fit_additive(d);
    double mean_ratio = 0.0;
    const int draws = 4000;
    for (int t = 0; t < draws; ++t) {
        RngStream rs(t, 1);
        const auto perm = sample_permutation(rs, 48);
        Matrix r(6, 8);
        for (Eigen::Index c = 0; c < 48; ++c) r(c / 8, c % 8) = f.residuals(static_cast<Eigen::Index>(perm[c]) / 8, static_cast<Eigen::Index>(perm[c]) % 8);
        mean_ratio += fit_additive(DataMatrix(r)).rss0 / f.rss0;
    }
    CHECK(mean_ratio / draws == doctest::Approx(35.0 / 47.0).epsilon(0.02));
}

TEST_CASE("bootstrap test is deterministic and independent of the worker count") {
    const DataMatrix d = to_data(noisy_tukey(5, 6, 0.2, 8, 1.0));
    const TestOutcome b1 = bootstrap_test(d, 0.05, resampling(Adjustment::bootstrap, 42, 300, 1));
    const TestOutcome b2 = bootstrap_test(d, 0.05, resampling(Adjustment::bootstrap, 42, 300, 4));
    CHECK(b1.statistic == b2.statistic);
    CHECK(b1.critical_value == b2.critical_value);
    CHECK(b1.p_value == b2.p_value);
    CHECK(b1.statistic == doctest::Approx(std::abs(fit_interaction(d).stage1.k)));
    CHECK(b1.adjustment == Adjustment::bootstrap);
}

TEST_CASE("strong interaction is detected by all three versions") {
    const DataMatrix d = to_data(noisy_tukey(8, 8, 1.0, 3, 0.5));
    CHECK(modified_tukey_test(d, 0.05).reject);
    CHECK(permutation_test(d, 0.05, resampling(Adjustment::permutation, 1)).reject);
    CHECK(bootstrap_test(d, 0.05, resampling(Adjustment::bootstrap, 1)).reject);
}

TEST_CASE("bootstrap on a perfect interaction fit rejects without resampling") {
    const auto y = testutil::tukey_model({-1.0, 0.0, 1.0}, {-1.0, -0.5, 0.5, 1.0}, 0.6, 2.0);
    const TestOutcome o = bootstrap_test(to_data(y), 0.05, resampling(Adjustment::bootstrap, 1));
    CHECK(o.reject);
    CHECK(o.critical_value == 0.0);
    CHECK_FALSE(o.warnings.empty());
}

TEST_CASE("automatic adjustment picks permutation below 20 levels") {
    CHECK(auto_adjustment(10, 10) == Adjustment::permutation);
    CHECK(auto_adjustment(19, 50) == Adjustment::permutation);
    CHECK(auto_adjustment(20, 20) == Adjustment::none);
    CHECK(auto_adjustment(50, 30) == Adjustment::none);
}
