#include "additivity/classic_tests.hpp"
#include "additivity/csv.hpp"
#include "additivity/errors.hpp"
#include "additivity/modified_tukey.hpp"
#include "additivity/power_lab.hpp"
#include "additivity/report.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace additivity;

namespace {

DataMatrix to_data(const Matrix& values) { return DataMatrix(values); }

py::object outcome_dict(const TestOutcome& o) {
    return py::module_::import("json").attr("loads")(to_json(o).dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Additivity tests for two-way layouts with one observation per cell";

    py::register_exception<Error>(m, "AdditivityError", PyExc_ValueError);

    py::enum_<Method>(m, "Method")
        .value("tukey", Method::tukey)
        .value("mandel", Method::mandel)
        .value("johnson_graybill", Method::johnson_graybill)
        .value("lbi", Method::lbi)
        .value("tusell", Method::tusell)
        .value("modified_tukey", Method::modified_tukey);

    py::class_<AdditiveFit>(m, "AdditiveFit")
        .def_readonly("grand_mean", &AdditiveFit::grand_mean)
        .def_readonly("row_effects", &AdditiveFit::row_effects)
        .def_readonly("col_effects", &AdditiveFit::col_effects)
        .def_readonly("residuals", &AdditiveFit::residuals)
        .def_readonly("rss0", &AdditiveFit::rss0);

    py::class_<SpectrumSummary>(m, "SpectrumSummary")
        .def_readonly("kappa", &SpectrumSummary::kappa)
        .def_readonly("omega", &SpectrumSummary::omega);

    py::class_<InteractionStage>(m, "InteractionStage")
        .def_readonly("alpha", &InteractionStage::alpha)
        .def_readonly("beta", &InteractionStage::beta)
        .def_readonly("k", &InteractionStage::k);

    py::class_<InteractionFit>(m, "InteractionFit")
        .def_readonly("grand_mean", &InteractionFit::grand_mean)
        .def_readonly("stage0", &InteractionFit::stage0)
        .def_readonly("stage1", &InteractionFit::stage1)
        .def_readonly("rss", &InteractionFit::rss)
        .def_readonly("rss0", &InteractionFit::rss0)
        .def_readonly("s2", &InteractionFit::s2)
        .def_readonly("iterations_run", &InteractionFit::iterations_run);

    py::class_<MonteCarloCritical>(m, "MonteCarloCritical")
        .def_readonly("a", &MonteCarloCritical::a)
        .def_readonly("b", &MonteCarloCritical::b)
        .def_readonly("alpha_level", &MonteCarloCritical::alpha_level)
        .def_readonly("replications", &MonteCarloCritical::replications)
        .def_readonly("critical_value", &MonteCarloCritical::critical_value)
        .def_readonly("seed", &MonteCarloCritical::seed)
        .def_readonly("uninformative", &MonteCarloCritical::uninformative)
        .def_property_readonly("method", [](const MonteCarloCritical& c) { return std::string(to_string(c.method)); });

    m.def("f_cdf", [](double x, int df1, int df2) { return f_cdf(x, FParams(df1, df2)); }, py::arg("x"),
          py::arg("df1"), py::arg("df2"));
    m.def("f_quantile", [](double p, int df1, int df2) { return f_quantile(p, FParams(df1, df2)); }, py::arg("p"),
          py::arg("df1"), py::arg("df2"));

    m.def("fit_additive", [](const Matrix& y) { return fit_additive(to_data(y)); }, py::arg("data"));
    m.def("spectrum", [](const Matrix& y) { return spectrum(fit_additive(to_data(y))); }, py::arg("data"));
    m.def("statistic",
          [](const Matrix& y, const std::string& method) { return classic_statistic(to_data(y), parse_method(method)); },
          py::arg("data"), py::arg("method"), "Statistic of tukey, mandel, jg, lbi or tusell.");

    m.def(
        "calibrate",
        [](const std::string& method, int a, int b, double alpha, std::size_t reps, std::uint64_t seed,
           unsigned workers) {
            auto cal = calibrate(parse_method(method), a, b, alpha, reps, RngStream(seed, 0), workers);
            cal.null_sample.clear();
            return cal;
        },
        py::arg("method"), py::arg("a"), py::arg("b"), py::arg("alpha") = 0.05, py::arg("replications") = 10000,
        py::arg("seed") = 0, py::arg("workers") = 0);

    m.def(
        "classic_test",
        [](const Matrix& y, const std::string& method, double alpha, std::size_t cal_reps, std::uint64_t seed) {
            ClassicTestOptions opts;
            opts.calibration_replications = cal_reps;
            const RngStream stream(seed, 0);
            return outcome_dict(run_classic_test(to_data(y), parse_method(method), alpha, nullptr, &stream, opts));
        },
        py::arg("data"), py::arg("method"), py::arg("alpha") = 0.05, py::arg("calibration_replications") = 10000,
        py::arg("seed") = 0);

    m.def(
        "fit_interaction",
        [](const Matrix& y, int iterations, bool snapshot) {
            FitOptions opts;
            opts.iterations = iterations;
            opts.mode = snapshot ? UpdateMode::snapshot : UpdateMode::sequential;
            return fit_interaction(to_data(y), opts);
        },
        py::arg("data"), py::arg("iterations") = 1, py::arg("snapshot") = false);

    m.def(
        "modified_tukey_test",
        [](const Matrix& y, double alpha, const std::string& adjust, std::size_t samples, std::uint64_t seed,
           const std::string& perm_stat) {
            const DataMatrix data = to_data(y);
            const Adjustment kind = adjust == "auto" ? auto_adjustment(data.rows(), data.cols()) : parse_adjustment(adjust);
            if (kind == Adjustment::none) return outcome_dict(modified_tukey_test(data, alpha));
            ResamplingConfig cfg;
            cfg.kind = kind;
            cfg.n_samples = samples;
            cfg.stream = RngStream(seed, 0);
            cfg.permutation_statistic =
                perm_stat == "diff" ? PermutationStatistic::difference : PermutationStatistic::f_ratio;
            return outcome_dict(kind == Adjustment::permutation ? permutation_test(data, alpha, cfg)
                                                                : bootstrap_test(data, alpha, cfg));
        },
        py::arg("data"), py::arg("alpha") = 0.05, py::arg("adjust") = "none", py::arg("samples") = 1000,
        py::arg("seed") = 0, py::arg("perm_stat") = "f");

    m.def(
        "generate",
        [](const std::string& scheme, int b, double k, std::uint64_t seed) {
            GeneratorConfig cfg;
            cfg.scheme = parse_scheme(scheme);
            cfg.b = b;
            cfg.k = k;
            RngStream stream(seed, 0);
            return Matrix(generate(cfg, stream).values());
        },
        py::arg("scheme") = "A", py::arg("b") = 10, py::arg("k") = 0.0, py::arg("seed") = 0);

    m.def(
        "power_grid",
        [](const std::vector<std::string>& schemes, const std::vector<double>& k_values, const std::vector<int>& b_values,
           const std::vector<std::string>& tests, double alpha, std::size_t reps, std::uint64_t seed,
           std::size_t cal_reps) {
            std::vector<Scheme> s;
            for (const auto& x : schemes) s.push_back(parse_scheme(x));
            std::vector<TestSpec> t;
            for (const auto& x : tests) t.push_back(parse_test_spec(x));
            PowerOptions opts;
            opts.calibration_replications = cal_reps;
            py::list rows;
            for (const PowerCell& c : run_grid(make_grid(s, k_values, b_values), t, alpha, reps, seed, {}, opts)) {
                py::dict row;
                row["scheme"] = std::string(to_string(c.scheme));
                row["k"] = c.k;
                row["b"] = c.b;
                row["test"] = c.test.name();
                row["replications"] = c.replications;
                row["rejections"] = c.rejections;
                row["power"] = c.power;
                row["seed"] = c.seed;
                rows.append(row);
            }
            return rows;
        },
        py::arg("schemes"), py::arg("k_values"), py::arg("b_values"), py::arg("tests"), py::arg("alpha") = 0.05,
        py::arg("replications") = 1000, py::arg("seed") = 0, py::arg("calibration_replications") = 10000);

    m.def("default_k_grid", &default_k_grid);
    m.def(
        "read_csv",
        [](const std::string& path) { return Matrix(read_csv_file(path).values()); }, py::arg("path"));
}
