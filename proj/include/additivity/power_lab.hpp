#pragma once

#include "additivity/classic_tests.hpp"
#include "additivity/distributions.hpp"
#include "additivity/modified_tukey.hpp"
#include "additivity/outcome.hpp"
#include "additivity/tabular.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace additivity {

enum class Scheme { none, A, B };

std::string_view to_string(Scheme s);
Scheme parse_scheme(std::string_view name);

/// Row effects used by the reference simulation design (a = 10, sum 0).
const std::vector<double>& reference_row_effects();

/// Mixed model y_ij = mu + alpha_i + beta_j + gamma_ij + eps_ij with fixed
/// alpha, beta_j ~ N(0, sigma_beta2), eps_ij ~ N(0, sigma2) and
///   scheme A: gamma_ij = k alpha_i beta_j
///   scheme B: gamma_ij = k alpha_i delta_j, delta_j ~ N(0, sigma_beta2).
struct GeneratorConfig {
    int a = 10;
    int b = 10;
    double mu = 0.0;
    std::vector<double> alpha = reference_row_effects();
    double sigma_beta2 = 2.0;
    double sigma2 = 1.0;
    Scheme scheme = Scheme::A;
    double k = 0.0;

    /// Throws DomainError if the config is inconsistent.
    void validate() const;
};

/// Draws beta (b values), delta (b values), then eps row by row, always in
/// that order so both schemes consume the stream identically.
DataMatrix generate(const GeneratorConfig& config, RngStream& stream);

/// A test as run inside the power study.
struct TestSpec {
    Method method = Method::tukey;
    Adjustment adjustment = Adjustment::none;

    std::string name() const;
    friend bool operator==(const TestSpec&, const TestSpec&) = default;
};

/// Parses tukey, mandel, jg, lbi, tusell, mtukey, mtukey_perm, mtukey_boot.
TestSpec parse_test_spec(std::string_view name);

struct PowerOptions {
    std::size_t calibration_replications = 10000;
    std::size_t resampling_samples = 1000;
    PermutationStatistic permutation_statistic = PermutationStatistic::f_ratio;
    MandelDf mandel_df = MandelDf::error_divisor;
    FitOptions fit;
    unsigned workers = 0;
};

struct PowerCell {
    TestSpec test;
    Scheme scheme = Scheme::A;
    double k = 0.0;
    int b = 0;
    std::size_t replications = 0;
    std::size_t rejections = 0;
    double power = 0.0;
    std::uint64_t seed = 0;
};

/// Replicate t draws its dataset (and any resampling) from
/// base_stream.substream(t); omnibus critical values are calibrated once per
/// call from a dedicated substream. Any test error aborts with a diagnostic.
PowerCell estimate_power(const GeneratorConfig& config, const TestSpec& test, double alpha_level,
                         std::size_t replications, const RngStream& base_stream, const PowerOptions& options = {});

/// Same replicates evaluated by several tests at once (common random
/// numbers); element i corresponds to tests[i].
std::vector<PowerCell> estimate_power(const GeneratorConfig& config, const std::vector<TestSpec>& tests,
                                      double alpha_level, std::size_t replications, const RngStream& base_stream,
                                      const PowerOptions& options = {});

struct GridPoint {
    Scheme scheme = Scheme::A;
    double k = 0.0;
    int b = 10;
};

/// Evenly spaced k values {0, 12/10, ..., 12}: 0 plus ten nonzero points.
std::vector<double> default_k_grid();

/// schemes x k_values x b_values in that nesting order.
std::vector<GridPoint> make_grid(const std::vector<Scheme>& schemes, const std::vector<double>& k_values,
                                 const std::vector<int>& b_values);

/// Evaluates every grid point against every test. The datasets of a grid
/// point depend only on (seed, b, replicate), so all k values and both
/// schemes share the same underlying normal draws. Rows are ordered by grid
/// point, then by test.
std::vector<PowerCell> run_grid(const std::vector<GridPoint>& grid, const std::vector<TestSpec>& tests,
                                double alpha_level, std::size_t replications, std::uint64_t seed,
                                const GeneratorConfig& base = {}, const PowerOptions& options = {});

/// Header + one row per cell: scheme, k, b, test, replications, rejections,
/// power, seed.
void write_power_table(std::ostream& out, const std::vector<PowerCell>& cells);

}  // namespace additivity
