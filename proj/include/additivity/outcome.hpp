#pragma once

#include "additivity/distributions.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace additivity {

enum class Method { tukey, mandel, johnson_graybill, lbi, tusell, modified_tukey };

enum class RejectionSide { high, low };

enum class Adjustment { none, permutation, bootstrap };

std::string_view to_string(Method m);
std::string_view to_string(RejectionSide s);
std::string_view to_string(Adjustment a);

/// Accepts the canonical names plus the short aliases jg, mtukey, modified.
/// Throws DomainError on anything else.
Method parse_method(std::string_view name);
Adjustment parse_adjustment(std::string_view name);

bool is_omnibus(Method m);
RejectionSide rejection_side(Method m);

/// Empirical null quantile of a statistic for a fixed layout size.
struct MonteCarloCritical {
    Method method = Method::johnson_graybill;
    int a = 0;
    int b = 0;
    double alpha_level = 0.05;
    std::size_t replications = 0;
    double critical_value = 0.0;
    std::uint64_t seed = 0;
    /// The statistic is constant under the null (min(a,b) == 2).
    bool uninformative = false;
    /// Sorted simulated statistics; empty when loaded from a cache file.
    std::vector<double> null_sample;
};

/// Reference distribution built by resampling the observed data.
struct ResamplingReference {
    Adjustment kind = Adjustment::permutation;
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
    std::size_t degenerate_samples = 0;
};

using Reference = std::variant<FParams, MonteCarloCritical, ResamplingReference>;

/// Result of one additivity test. reject is true exactly when the statistic
/// lies strictly beyond critical_value on the rejection side.
struct TestOutcome {
    Method method = Method::tukey;
    Adjustment adjustment = Adjustment::none;
    double statistic = 0.0;
    Reference reference;
    double critical_value = 0.0;
    double alpha_level = 0.05;
    bool reject = false;
    RejectionSide rejection_side = RejectionSide::high;
    std::optional<double> p_value;
    std::vector<std::string> warnings;
};

/// Applies the rejection rule to statistic and critical value.
bool decide(double statistic, double critical_value, RejectionSide side);

}  // namespace additivity
