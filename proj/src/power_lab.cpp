#include "additivity/power_lab.hpp"

#include "additivity/errors.hpp"
#include "additivity/parallel.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>

namespace additivity {

namespace {

// Substream index reserved for omnibus calibration; replicate indices are
// far below it.
constexpr std::uint64_t kCalibrationSubstream = 0xCA11B4A7E0000000ull;

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

using CalibrationTable = std::map<Method, MonteCarloCritical>;

void check_alpha(double alpha_level) {
    if (!(alpha_level > 0.0 && alpha_level < 1.0)) throw DomainError("alpha level must lie in (0, 1)");
}

CalibrationTable calibrate_for(const std::vector<TestSpec>& tests, int a, int b, double alpha_level,
                               const RngStream& stream, const PowerOptions& options) {
    CalibrationTable table;
    for (const TestSpec& t : tests) {
        if (!is_omnibus(t.method) || table.count(t.method)) continue;
        table.emplace(t.method, calibrate(t.method, a, b, alpha_level, options.calibration_replications, stream,
                                          options.workers));
    }
    return table;
}

bool run_one(const DataMatrix& data, const TestSpec& test, double alpha_level, const CalibrationTable& calibrations,
             const RngStream& replicate_stream, const PowerOptions& options) {
    if (test.method == Method::modified_tukey) {
        if (test.adjustment == Adjustment::none) return modified_tukey_test(data, alpha_level, options.fit).reject;
        ResamplingConfig cfg;
        cfg.kind = test.adjustment;
        cfg.n_samples = options.resampling_samples;
        cfg.permutation_statistic = options.permutation_statistic;
        cfg.stream = replicate_stream.substream(1 + static_cast<std::uint64_t>(test.adjustment));
        cfg.workers = 1;
        cfg.fit = options.fit;
        return test.adjustment == Adjustment::permutation ? permutation_test(data, alpha_level, cfg).reject
                                                          : bootstrap_test(data, alpha_level, cfg).reject;
    }
    ClassicTestOptions classic;
    classic.mandel_df = options.mandel_df;
    classic.workers = 1;
    const MonteCarloCritical* cal = nullptr;
    if (is_omnibus(test.method)) cal = &calibrations.at(test.method);
    return run_classic_test(data, test.method, alpha_level, cal, nullptr, classic).reject;
}

std::vector<PowerCell> run_replicates(const GeneratorConfig& config, const std::vector<TestSpec>& tests,
                                      double alpha_level, std::size_t replications, const RngStream& base,
                                      const CalibrationTable& calibrations, const PowerOptions& options) {
    const std::size_t n_tests = tests.size();
    std::vector<char> rejected(replications * n_tests, 0);
    parallel_for(replications, options.workers, [&](std::size_t t) {
        RngStream rs = base.substream(t);
        const DataMatrix data = generate(config, rs);
        for (std::size_t m = 0; m < n_tests; ++m) {
            try {
                rejected[t * n_tests + m] = run_one(data, tests[m], alpha_level, calibrations, rs, options) ? 1 : 0;
            } catch (const Error& e) {
                throw Error("power study aborted: replicate " + std::to_string(t) + " (scheme " +
                            std::string(to_string(config.scheme)) + ", k=" + format_double(config.k) +
                            ", b=" + std::to_string(config.b) + ", test " + tests[m].name() + "): " + e.what());
            }
        }
    });

    std::vector<PowerCell> cells;
    cells.reserve(n_tests);
    for (std::size_t m = 0; m < n_tests; ++m) {
        PowerCell c;
        c.test = tests[m];
        c.scheme = config.scheme;
        c.k = config.k;
        c.b = config.b;
        c.replications = replications;
        for (std::size_t t = 0; t < replications; ++t) c.rejections += static_cast<std::size_t>(rejected[t * n_tests + m]);
        c.power = static_cast<double>(c.rejections) / static_cast<double>(replications);
        c.seed = base.seed();
        cells.push_back(c);
    }
    return cells;
}

}  // namespace

std::string_view to_string(Scheme s) {
    switch (s) {
        case Scheme::none: return "none";
        case Scheme::A: return "A";
        case Scheme::B: return "B";
    }
    return "unknown";
}

Scheme parse_scheme(std::string_view name) {
    if (name == "A" || name == "a") return Scheme::A;
    if (name == "B" || name == "b") return Scheme::B;
    if (name == "none") return Scheme::none;
    throw DomainError("unknown interaction scheme '" + std::string(name) + "'");
}

const std::vector<double>& reference_row_effects() {
    static const std::vector<double> alpha{-2.03, -1.92, -1.27, -0.70, 0.46, 0.61, 0.84, 0.94, 1.07, 2.00};
    return alpha;
}

void GeneratorConfig::validate() const {
    if (a < 2 || b < 2) throw DimensionError("generator needs a >= 2 and b >= 2");
    if (static_cast<int>(alpha.size()) != a) throw DomainError("row effect vector must have length a");
    double sum = 0.0;
    double scale = 0.0;
    for (double v : alpha) {
        sum += v;
        scale += std::abs(v);
    }
    if (std::abs(sum) > 1e-9 * std::max(1.0, scale)) throw DomainError("row effects must sum to zero");
    if (!(sigma_beta2 >= 0.0) || !(sigma2 >= 0.0)) throw DomainError("variances must be non-negative");
    if (!std::isfinite(mu) || !std::isfinite(k)) throw DomainError("mu and k must be finite");
}

DataMatrix generate(const GeneratorConfig& config, RngStream& stream) {
    config.validate();
    const std::vector<double> beta = sample_normal(stream, static_cast<std::size_t>(config.b), 0.0,
                                                   std::sqrt(config.sigma_beta2));
    const std::vector<double> delta = sample_normal(stream, static_cast<std::size_t>(config.b), 0.0,
                                                    std::sqrt(config.sigma_beta2));
    const double sd = std::sqrt(config.sigma2);

    Matrix y(config.a, config.b);
    for (int i = 0; i < config.a; ++i) {
        const double ai = config.alpha[static_cast<std::size_t>(i)];
        for (int j = 0; j < config.b; ++j) {
            const auto jj = static_cast<std::size_t>(j);
            double gamma = 0.0;
            if (config.scheme == Scheme::A) gamma = config.k * ai * beta[jj];
            if (config.scheme == Scheme::B) gamma = config.k * ai * delta[jj];
            y(i, j) = config.mu + ai + beta[jj] + gamma + sd * stream.normal();
        }
    }
    return DataMatrix(std::move(y));
}

std::string TestSpec::name() const {
    if (method != Method::modified_tukey) {
        return method == Method::johnson_graybill ? "jg" : std::string(to_string(method));
    }
    switch (adjustment) {
        case Adjustment::none: return "mtukey";
        case Adjustment::permutation: return "mtukey_perm";
        case Adjustment::bootstrap: return "mtukey_boot";
    }
    return "mtukey";
}

TestSpec parse_test_spec(std::string_view name) {
    if (name == "mtukey_perm") return {Method::modified_tukey, Adjustment::permutation};
    if (name == "mtukey_boot") return {Method::modified_tukey, Adjustment::bootstrap};
    return {parse_method(name), Adjustment::none};
}

PowerCell estimate_power(const GeneratorConfig& config, const TestSpec& test, double alpha_level,
                         std::size_t replications, const RngStream& base_stream, const PowerOptions& options) {
    return estimate_power(config, std::vector<TestSpec>{test}, alpha_level, replications, base_stream, options)
        .front();
}

std::vector<PowerCell> estimate_power(const GeneratorConfig& config, const std::vector<TestSpec>& tests,
                                      double alpha_level, std::size_t replications, const RngStream& base_stream,
                                      const PowerOptions& options) {
    if (replications < 100) throw DomainError("power estimation needs at least 100 replications");
    if (tests.empty()) throw DomainError("no tests requested");
    check_alpha(alpha_level);
    config.validate();
    const CalibrationTable cal = calibrate_for(tests, config.a, config.b, alpha_level,
                                               base_stream.substream(kCalibrationSubstream), options);
    return run_replicates(config, tests, alpha_level, replications, base_stream, cal, options);
}

std::vector<double> default_k_grid() {
    std::vector<double> k(11);
    for (int i = 0; i <= 10; ++i) k[static_cast<std::size_t>(i)] = 12.0 * i / 10.0;
    return k;
}

std::vector<GridPoint> make_grid(const std::vector<Scheme>& schemes, const std::vector<double>& k_values,
                                 const std::vector<int>& b_values) {
    std::vector<GridPoint> grid;
    for (Scheme s : schemes) {
        for (double k : k_values) {
            for (int b : b_values) grid.push_back({s, k, b});
        }
    }
    return grid;
}

std::vector<PowerCell> run_grid(const std::vector<GridPoint>& grid, const std::vector<TestSpec>& tests,
                                double alpha_level, std::size_t replications, std::uint64_t seed,
                                const GeneratorConfig& base, const PowerOptions& options) {
    if (grid.empty()) throw DomainError("power grid is empty");
    if (tests.empty()) throw DomainError("no tests requested");
    if (replications < 100) throw DomainError("power estimation needs at least 100 replications");
    check_alpha(alpha_level);

    std::map<int, CalibrationTable> calibrations;
    std::vector<PowerCell> out;
    for (const GridPoint& p : grid) {
        GeneratorConfig cfg = base;
        cfg.scheme = p.scheme;
        cfg.k = p.k;
        cfg.b = p.b;
        cfg.validate();
        const RngStream stream(seed, static_cast<std::uint64_t>(p.b));
        auto it = calibrations.find(p.b);
        if (it == calibrations.end()) {
            it = calibrations
                     .emplace(p.b, calibrate_for(tests, cfg.a, cfg.b, alpha_level,
                                                 stream.substream(kCalibrationSubstream), options))
                     .first;
        }
        auto cells = run_replicates(cfg, tests, alpha_level, replications, stream, it->second, options);
        out.insert(out.end(), cells.begin(), cells.end());
    }
    return out;
}

void write_power_table(std::ostream& out, const std::vector<PowerCell>& cells) {
    out << "scheme\tk\tb\ttest\treplications\trejections\tpower\tseed\n";
    for (const PowerCell& c : cells) {
        out << to_string(c.scheme) << '\t' << format_double(c.k) << '\t' << c.b << '\t' << c.test.name() << '\t'
            << c.replications << '\t' << c.rejections << '\t' << format_double(c.power) << '\t' << c.seed << '\n';
    }
}

}  // namespace additivity
