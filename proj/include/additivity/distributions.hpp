#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

namespace additivity {

/// Degrees of freedom of an F distribution.
struct FParams {
    int df1 = 1;
    int df2 = 1;

    /// Throws DomainError unless both are >= 1.
    FParams(int numerator, int denominator);
    FParams() = default;

    friend bool operator==(const FParams&, const FParams&) = default;
};

/// P(F <= x). Throws DomainError for x < 0 or NaN.
double f_cdf(double x, const FParams& params);

/// Upper tail P(F > x), computed without cancellation.
double f_sf(double x, const FParams& params);

/// Inverse of f_cdf on (0, 1). Throws DomainError outside the open interval.
double f_quantile(double p, const FParams& params);

/// Regularized incomplete beta I_x(a, b); y = 1 - x is passed separately so
/// callers can supply it without cancellation.
double regularized_incomplete_beta(double a, double b, double x, double y);

/// Counter-based Philox4x32-10 generator. The key is the 64-bit seed and the
/// 128-bit counter is (block index, stream id), so every (seed, stream_id)
/// pair names an independent stream of 2^66 32-bit words and the output is
/// identical on every platform.
class RngStream {
public:
    using result_type = std::uint64_t;

    explicit RngStream(std::uint64_t seed = 0, std::uint64_t stream_id = 0) noexcept;

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    /// Child stream for unit of work `index`; depends only on
    /// (seed, stream_id, index), never on how much of this stream was used.
    RngStream substream(std::uint64_t index) const noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
    result_type operator()() noexcept;

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    /// Uniform on 0..n-1 without modulo bias; n must be >= 1.
    std::uint64_t uniform_index(std::uint64_t n) noexcept;
    /// Standard normal (Marsaglia polar method).
    double normal() noexcept;

    /// One raw Philox4x32-10 block, exposed for known-answer tests.
    static std::array<std::uint32_t, 4> philox_block(std::array<std::uint32_t, 4> counter,
                                                     std::array<std::uint32_t, 2> key) noexcept;

private:
    std::uint32_t next_word() noexcept;

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

/// n i.i.d. N(mean, sd^2) draws. Throws DomainError if sd < 0.
std::vector<double> sample_normal(RngStream& stream, std::size_t n, double mean = 0.0, double sd = 1.0);

/// Uniform random permutation of 0..n-1 (Fisher-Yates).
std::vector<std::size_t> sample_permutation(RngStream& stream, std::size_t n);

}  // namespace additivity
