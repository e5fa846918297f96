#include "additivity/distributions.hpp"

#include "additivity/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace additivity {

FParams::FParams(int numerator, int denominator) : df1(numerator), df2(denominator) {
    if (df1 < 1 || df2 < 1) {
        throw DomainError("F degrees of freedom must be >= 1, got (" + std::to_string(df1) + ", " +
                          std::to_string(df2) + ")");
    }
}

namespace {

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxTerms = 20000;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxTerms; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h;
    }
    return h;
}

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

void check_x(double x) {
    if (std::isnan(x) || x < 0.0) throw DomainError("F distribution is supported on x >= 0");
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x, double y) {
    if (x <= 0.0) return 0.0;
    if (y <= 0.0) return 1.0;
    const double log_front = a * std::log(x) + b * std::log(y) - log_beta(a, b);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return std::exp(log_front) * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - std::exp(log_front) * beta_continued_fraction(b, a, y) / b;
}

double f_cdf(double x, const FParams& p) {
    check_x(x);
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    const double d1 = p.df1;
    const double d2 = p.df2;
    const double denom = d1 * x + d2;
    return regularized_incomplete_beta(0.5 * d1, 0.5 * d2, d1 * x / denom, d2 / denom);
}

double f_sf(double x, const FParams& p) {
    check_x(x);
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    const double d1 = p.df1;
    const double d2 = p.df2;
    const double denom = d1 * x + d2;
    return regularized_incomplete_beta(0.5 * d2, 0.5 * d1, d2 / denom, d1 * x / denom);
}

double f_quantile(double prob, const FParams& params) {
    if (!(prob > 0.0 && prob < 1.0)) throw DomainError("F quantile needs 0 < p < 1");

    double lo = 0.0;
    double hi = 1.0;
    while (f_cdf(hi, params) < prob) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) return hi;
    }
    // Bisection on a monotone function keeps the result monotone in p.
    for (int it = 0; it < 2000; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (f_cdf(mid, params) < prob) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1e-15 * hi) break;
    }
    return 0.5 * (lo + hi);
}

// --- RngStream -----------------------------------------------------------

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

std::array<std::uint32_t, 4> RngStream::philox_block(std::array<std::uint32_t, 4> ctr,
                                                     std::array<std::uint32_t, 2> key) noexcept {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kPhiloxW0;
            key[1] += kPhiloxW1;
        }
        const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
    : seed_(seed), stream_id_(stream_id) {}

RngStream RngStream::substream(std::uint64_t index) const noexcept {
    return RngStream(seed_, splitmix64(splitmix64(stream_id_) ^ (index * 0xD1B54A32D192ED03ull + 1)));
}

std::uint32_t RngStream::next_word() noexcept {
    if (used_ == 4) {
        const std::array<std::uint32_t, 4> counter{
            static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
            static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)};
        buffer_ = philox_block(counter, {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
        ++block_;
        used_ = 0;
    }
    return buffer_[static_cast<std::size_t>(used_++)];
}

RngStream::result_type RngStream::operator()() noexcept {
    const std::uint64_t lo = next_word();
    const std::uint64_t hi = next_word();
    return (hi << 32) | lo;
}

double RngStream::uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_index(std::uint64_t n) noexcept {
    // Lemire's multiply-and-reject.
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            m = static_cast<unsigned __int128>((*this)()) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

double RngStream::normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_normal_ = v * factor;
    has_spare_ = true;
    return u * factor;
}

std::vector<double> sample_normal(RngStream& stream, std::size_t n, double mean, double sd) {
    if (!(sd >= 0.0)) throw DomainError("normal standard deviation must be >= 0");
    std::vector<double> out(n);
    for (double& v : out) v = mean + sd * stream.normal();
    return out;
}

std::vector<std::size_t> sample_permutation(RngStream& stream, std::size_t n) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) {
        const auto j = static_cast<std::size_t>(stream.uniform_index(i));
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

}  // namespace additivity
