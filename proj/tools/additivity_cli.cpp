// additivity: command-line front end for the two-way additivity tests.
//
//   additivity test data.csv --method mtukey --adjust auto --seed 42
//   additivity calibrate --method lbi --a 10 --b 10 --reps 10000 --seed 7
//   additivity power --paper --fast --out power.tsv
//   additivity generate --scheme B --b 50 --k 12 --seed 3 --out data.csv
//
// Exit codes: test -> 0 accept, 1 reject, 2 error; other commands -> 0 / 2.

#include "additivity/classic_tests.hpp"
#include "additivity/csv.hpp"
#include "additivity/errors.hpp"
#include "additivity/modified_tukey.hpp"
#include "additivity/power_lab.hpp"
#include "additivity/report.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace additivity;

constexpr int kExitAccept = 0;
constexpr int kExitReject = 1;
constexpr int kExitError = 2;

std::string cache_path(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("ADDITIVITY_CACHE")) return env;
    return {};
}

PermutationStatistic parse_perm_stat(const std::string& name) {
    return name == "diff" ? PermutationStatistic::difference : PermutationStatistic::f_ratio;
}

struct TestArgs {
    std::string path;
    std::string method = "tukey";
    double alpha = 0.05;
    std::string adjust = "none";
    std::size_t samples = 1000;
    std::string perm_stat = "f";
    std::uint64_t seed = 0;
    bool transpose = false;
    int iterations = 1;
    bool snapshot = false;
    std::string mandel_df = "error";
    std::size_t cal_reps = 10000;
    std::string cache;
    std::string delimiter = ",";
    bool no_header = false;
    bool no_labels = false;
    bool tsv = false;
    bool timing = false;
    unsigned threads = 0;
};

int run_test(const TestArgs& args) {
    const auto start = std::chrono::steady_clock::now();

    std::ifstream in(args.path, std::ios::binary);
    if (!in) throw Error("cannot open '" + args.path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string bytes = buffer.str();

    CsvOptions csv;
    csv.delimiter = args.delimiter.empty() ? ',' : args.delimiter[0];
    if (args.no_header) csv.header = false;
    if (args.no_labels) csv.row_labels = false;
    std::istringstream parse_in(bytes);
    DataMatrix data = read_csv(parse_in, csv);
    if (args.transpose) data = data.transposed();

    const Method method = parse_method(args.method);
    Adjustment adjust = Adjustment::none;
    if (method == Method::modified_tukey) {
        adjust = args.adjust == "auto" ? auto_adjustment(data.rows(), data.cols()) : parse_adjustment(args.adjust);
    } else if (args.adjust != "none" && args.adjust != "auto") {
        throw DomainError("--adjust applies to the modified Tukey test only");
    }

    FitOptions fit;
    fit.iterations = args.iterations;
    fit.mode = args.snapshot ? UpdateMode::snapshot : UpdateMode::sequential;
    const RngStream stream(args.seed, 0);

    TestOutcome outcome;
    if (method == Method::modified_tukey) {
        if (adjust == Adjustment::none) {
            outcome = modified_tukey_test(data, args.alpha, fit);
        } else {
            ResamplingConfig cfg;
            cfg.kind = adjust;
            cfg.n_samples = args.samples;
            cfg.permutation_statistic = parse_perm_stat(args.perm_stat);
            cfg.stream = stream;
            cfg.workers = args.threads;
            cfg.fit = fit;
            outcome = adjust == Adjustment::permutation ? permutation_test(data, args.alpha, cfg)
                                                        : bootstrap_test(data, args.alpha, cfg);
        }
    } else {
        ClassicTestOptions opts;
        opts.mandel_df = args.mandel_df == "printed" ? MandelDf::printed : MandelDf::error_divisor;
        opts.calibration_replications = args.cal_reps;
        opts.workers = args.threads;
        std::optional<MonteCarloCritical> cal;
        const std::string cpath = cache_path(args.cache);
        if (is_omnibus(method) && !cpath.empty()) {
            CriticalValueCache cache(cpath);
            const int a = static_cast<int>(data.rows());
            const int b = static_cast<int>(data.cols());
            cal = cache.find(method, a, b, args.alpha, args.cal_reps, args.seed);
            if (!cal) {
                cal = calibrate(method, a, b, args.alpha, args.cal_reps, stream, args.threads);
                if (cache.insert(*cal)) cache.save();
            }
            // Cached records carry no null sample; drop it so reports do not
            // depend on whether the cache was warm.
            cal->null_sample.clear();
        }
        outcome = run_classic_test(data, method, args.alpha, cal ? &*cal : nullptr, &stream, opts);
    }

    RunReport report;
    report.input = {args.path, static_cast<int>(data.rows()), static_cast<int>(data.cols()), fnv1a64_hex(bytes)};
    report.options = {{"method", std::string(to_string(method))},
                      {"alpha", args.alpha},
                      {"adjust", std::string(to_string(adjust))},
                      {"samples", args.samples},
                      {"permutation_statistic", args.perm_stat},
                      {"seed", args.seed},
                      {"transpose", args.transpose},
                      {"iterations", args.iterations},
                      {"update_mode", args.snapshot ? "snapshot" : "sequential"},
                      {"mandel_df", args.mandel_df},
                      {"calibration_replications", args.cal_reps}};
    report.outcome = outcome;
    if (args.timing) {
        report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }

    for (const auto& w : outcome.warnings) std::cerr << "warning: " << w << '\n';
    if (args.tsv) {
        std::cout << to_tsv(report);
    } else {
        std::cout << to_json(report).dump(2) << '\n';
    }
    return outcome.reject ? kExitReject : kExitAccept;
}

struct CalibrateArgs {
    std::string method = "johnson_graybill";
    int a = 10;
    int b = 10;
    double alpha = 0.05;
    std::size_t reps = 10000;
    std::uint64_t seed = 0;
    std::string cache;
    unsigned threads = 0;
};

int run_calibrate(const CalibrateArgs& args) {
    const Method method = parse_method(args.method);
    const std::string cpath = cache_path(args.cache).empty() ? "additivity_cache.tsv" : cache_path(args.cache);
    CriticalValueCache cache(cpath);

    MonteCarloCritical cal;
    if (auto hit = cache.find(method, args.a, args.b, args.alpha, args.reps, args.seed)) {
        cal = *hit;
    } else {
        cal = calibrate(method, args.a, args.b, args.alpha, args.reps, RngStream(args.seed, 0), args.threads);
        if (cache.insert(cal)) cache.save();
    }
    if (cal.uninformative) {
        std::cerr << "warning: " << uninformative_warning(method, args.a, args.b) << '\n';
    }
    nlohmann::json j = to_json(cal);
    j["cache"] = cpath;
    std::cout << j.dump(2) << '\n';
    return 0;
}

struct PowerArgs {
    std::vector<std::string> schemes{"A", "B"};
    std::vector<std::string> tests{"tukey", "mandel", "jg", "lbi", "tusell", "mtukey"};
    std::vector<int> b_values{10, 50};
    std::vector<double> kgrid;
    std::size_t reps = 10000;
    bool fast = false;
    bool paper = false;
    double alpha = 0.05;
    std::uint64_t seed = 20100401;
    std::string out;
    std::size_t cal_reps = 10000;
    std::size_t samples = 1000;
    std::string perm_stat = "f";
    unsigned threads = 0;
};

int run_power(PowerArgs args) {
    if (args.paper) {
        args.schemes = {"A", "B"};
        args.tests = {"tukey", "mandel", "jg", "lbi", "tusell", "mtukey"};
        args.b_values = {10, 50};
        args.kgrid.clear();
        args.reps = 10000;
    }
    if (args.fast) args.reps = 1000;
    if (args.kgrid.empty()) args.kgrid = default_k_grid();

    std::vector<Scheme> schemes;
    for (const auto& s : args.schemes) schemes.push_back(parse_scheme(s));
    std::vector<TestSpec> tests;
    for (const auto& t : args.tests) tests.push_back(parse_test_spec(t));

    PowerOptions opts;
    opts.calibration_replications = args.cal_reps;
    opts.resampling_samples = args.samples;
    opts.permutation_statistic = parse_perm_stat(args.perm_stat);
    opts.workers = args.threads;
    const auto cells = run_grid(make_grid(schemes, args.kgrid, args.b_values), tests, args.alpha, args.reps,
                                args.seed, GeneratorConfig{}, opts);
    if (args.out.empty() || args.out == "-") {
        write_power_table(std::cout, cells);
    } else {
        std::ofstream out(args.out, std::ios::trunc);
        if (!out) throw Error("cannot write '" + args.out + "'");
        write_power_table(out, cells);
    }
    return 0;
}

struct GenerateArgs {
    std::string scheme = "A";
    int b = 10;
    double k = 0.0;
    std::uint64_t seed = 0;
    std::string out;
};

int run_generate(const GenerateArgs& args) {
    GeneratorConfig cfg;
    cfg.scheme = parse_scheme(args.scheme);
    cfg.b = args.b;
    cfg.k = args.k;
    RngStream stream(args.seed, 0);
    const DataMatrix data = generate(cfg, stream);
    if (args.out.empty() || args.out == "-") {
        write_csv(std::cout, data);
    } else {
        std::ofstream out(args.out, std::ios::trunc);
        if (!out) throw Error("cannot write '" + args.out + "'");
        write_csv(out, data);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Additivity tests for two-way layouts with one observation per cell"};
    app.require_subcommand(1);

    TestArgs targs;
    auto* test = app.add_subcommand("test", "run an additivity test on a CSV grid");
    test->add_option("path", targs.path, "CSV file (rows x columns)")->required();
    test->add_option("--method", targs.method, "tukey | mandel | jg | lbi | tusell | mtukey")->capture_default_str();
    test->add_option("--alpha", targs.alpha, "significance level")->capture_default_str();
    test->add_option("--adjust", targs.adjust, "none | perm | boot | auto (modified Tukey only)")
        ->check(CLI::IsMember({"none", "perm", "permutation", "boot", "bootstrap", "auto"}))
        ->capture_default_str();
    test->add_option("--samples", targs.samples, "resampling size for --adjust perm|boot")->capture_default_str();
    test->add_option("--perm-stat", targs.perm_stat, "permutation statistic: f = F ratio, diff = RSS0 - RSS")
        ->check(CLI::IsMember({"f", "diff"}))
        ->capture_default_str();
    test->add_option("--seed", targs.seed, "random seed")->capture_default_str();
    test->add_flag("--transpose", targs.transpose, "swap the roles of rows and columns");
    test->add_option("--iterations", targs.iterations, "iterations of the interaction fit")->capture_default_str();
    test->add_flag("--snapshot", targs.snapshot, "update all parameters from the previous iteration");
    test->add_option("--mandel-df", targs.mandel_df, "Mandel error df: error = (a-1)(b-2), printed = (a-1)(b-1)")
        ->check(CLI::IsMember({"error", "printed"}))
        ->capture_default_str();
    test->add_option("--cal-reps", targs.cal_reps, "Monte Carlo replications for omnibus critical values")
        ->capture_default_str();
    test->add_option("--cache", targs.cache, "critical-value cache file (default: $ADDITIVITY_CACHE)");
    test->add_option("--delimiter", targs.delimiter, "CSV field delimiter")->capture_default_str();
    test->add_flag("--no-header", targs.no_header, "first line is data");
    test->add_flag("--no-labels", targs.no_labels, "first column is data");
    test->add_flag("--tsv", targs.tsv, "key<TAB>value output instead of JSON");
    test->add_flag("--timing", targs.timing, "include wall time in the report");
    test->add_option("--threads", targs.threads, "worker threads (0 = all cores)");

    CalibrateArgs cargs;
    auto* cal = app.add_subcommand("calibrate", "compute and cache a Monte Carlo critical value");
    cal->add_option("--method", cargs.method, "jg | lbi | tusell (tukey, mandel also accepted)")->capture_default_str();
    cal->add_option("--a", cargs.a, "rows")->capture_default_str();
    cal->add_option("--b", cargs.b, "columns")->capture_default_str();
    cal->add_option("--alpha", cargs.alpha, "significance level")->capture_default_str();
    cal->add_option("--reps", cargs.reps, "replications (>= 1000)")->capture_default_str();
    cal->add_option("--seed", cargs.seed, "random seed")->capture_default_str();
    cal->add_option("--cache", cargs.cache, "cache file (default: $ADDITIVITY_CACHE or additivity_cache.tsv)");
    cal->add_option("--threads", cargs.threads, "worker threads (0 = all cores)");

    PowerArgs pargs;
    auto* power = app.add_subcommand("power", "simulate power over a (scheme, k, b, test) grid");
    power->add_option("--scheme", pargs.schemes, "interaction schemes")->delimiter(',')->capture_default_str();
    power->add_option("--tests", pargs.tests, "tests")->delimiter(',')->capture_default_str();
    power->add_option("--b", pargs.b_values, "column counts")->delimiter(',')->capture_default_str();
    power->add_option("--kgrid", pargs.kgrid, "interaction strengths (default 0, 1.2, ..., 12)")->delimiter(',');
    power->add_option("--reps", pargs.reps, "replications per cell")->capture_default_str();
    power->add_flag("--fast", pargs.fast, "1000 replications per cell");
    power->add_flag("--paper", pargs.paper, "full reference design (schemes A,B; b 10,50; all tests)");
    power->add_option("--alpha", pargs.alpha, "significance level")->capture_default_str();
    power->add_option("--seed", pargs.seed, "random seed")->capture_default_str();
    power->add_option("--out", pargs.out, "output TSV (default stdout)");
    power->add_option("--cal-reps", pargs.cal_reps, "omnibus calibration replications")->capture_default_str();
    power->add_option("--samples", pargs.samples, "resampling size for mtukey_perm / mtukey_boot")
        ->capture_default_str();
    power->add_option("--perm-stat", pargs.perm_stat, "permutation statistic: f = F ratio, diff = RSS0 - RSS")
        ->check(CLI::IsMember({"f", "diff"}))
        ->capture_default_str();
    power->add_option("--threads", pargs.threads, "worker threads (0 = all cores)");

    GenerateArgs gargs;
    auto* gen = app.add_subcommand("generate", "write one simulated dataset of the reference design as CSV");
    gen->add_option("--scheme", gargs.scheme, "A | B | none")->capture_default_str();
    gen->add_option("--b", gargs.b, "columns")->capture_default_str();
    gen->add_option("--k", gargs.k, "interaction strength")->capture_default_str();
    gen->add_option("--seed", gargs.seed, "random seed")->capture_default_str();
    gen->add_option("--out", gargs.out, "output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitError;
    }

    try {
        if (*test) return run_test(targs);
        if (*cal) return run_calibrate(cargs);
        if (*power) return run_power(pargs);
        if (*gen) return run_generate(gargs);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}
