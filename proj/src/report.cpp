#include "additivity/report.hpp"

#include "additivity/errors.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace additivity {

using nlohmann::json;

namespace {

// JSON has no infinities; they travel as strings.
json number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

double number_from(const json& j) {
    if (j.is_number()) return j.get<double>();
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw Error("expected a number, got '" + s + "'");
}

RejectionSide side_from(const std::string& s) {
    if (s == "high") return RejectionSide::high;
    if (s == "low") return RejectionSide::low;
    throw Error("unknown rejection side '" + s + "'");
}

json reference_json(const Reference& ref) {
    if (const auto* f = std::get_if<FParams>(&ref)) {
        return {{"kind", "f"}, {"df1", f->df1}, {"df2", f->df2}};
    }
    if (const auto* mc = std::get_if<MonteCarloCritical>(&ref)) {
        json j = to_json(*mc);
        j["kind"] = "monte_carlo";
        return j;
    }
    const auto& r = std::get<ResamplingReference>(ref);
    return {{"kind", std::string(to_string(r.kind))},
            {"n_samples", r.n_samples},
            {"seed", r.seed},
            {"stream_id", r.stream_id},
            {"degenerate_samples", r.degenerate_samples}};
}

Reference reference_from(const json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "f") return FParams(j.at("df1").get<int>(), j.at("df2").get<int>());
    if (kind == "monte_carlo") return critical_from_json(j);
    ResamplingReference r;
    r.kind = parse_adjustment(kind);
    r.n_samples = j.at("n_samples").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.stream_id = j.at("stream_id").get<std::uint64_t>();
    r.degenerate_samples = j.at("degenerate_samples").get<std::size_t>();
    return r;
}

void flatten(const json& j, const std::string& prefix, std::ostringstream& out) {
    if (j.is_object()) {
        for (const auto& [key, value] : j.items()) flatten(value, prefix.empty() ? key : prefix + "." + key, out);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), out);
    } else {
        out << prefix << '\t' << (j.is_string() ? j.get<std::string>() : j.dump()) << '\n';
    }
}

}  // namespace

std::string fnv1a64_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json to_json(const MonteCarloCritical& cal) {
    return {{"method", std::string(to_string(cal.method))},
            {"a", cal.a},
            {"b", cal.b},
            {"alpha_level", cal.alpha_level},
            {"replications", cal.replications},
            {"critical_value", number(cal.critical_value)},
            {"seed", cal.seed},
            {"uninformative", cal.uninformative}};
}

MonteCarloCritical critical_from_json(const json& j) {
    MonteCarloCritical c;
    c.method = parse_method(j.at("method").get<std::string>());
    c.a = j.at("a").get<int>();
    c.b = j.at("b").get<int>();
    c.alpha_level = j.at("alpha_level").get<double>();
    c.replications = j.at("replications").get<std::size_t>();
    c.critical_value = number_from(j.at("critical_value"));
    c.seed = j.at("seed").get<std::uint64_t>();
    c.uninformative = j.at("uninformative").get<bool>();
    return c;
}

json to_json(const TestOutcome& o) {
    json j{{"method", std::string(to_string(o.method))},
           {"adjustment", std::string(to_string(o.adjustment))},
           {"statistic", number(o.statistic)},
           {"critical_value", number(o.critical_value)},
           {"alpha_level", o.alpha_level},
           {"rejection_side", std::string(to_string(o.rejection_side))},
           {"reject", o.reject},
           {"p_value", o.p_value ? number(*o.p_value) : json(nullptr)},
           {"reference", reference_json(o.reference)},
           {"warnings", o.warnings}};
    return j;
}

TestOutcome outcome_from_json(const json& j) {
    TestOutcome o;
    o.method = parse_method(j.at("method").get<std::string>());
    o.adjustment = parse_adjustment(j.at("adjustment").get<std::string>());
    o.statistic = number_from(j.at("statistic"));
    o.critical_value = number_from(j.at("critical_value"));
    o.alpha_level = j.at("alpha_level").get<double>();
    o.rejection_side = side_from(j.at("rejection_side").get<std::string>());
    o.reject = j.at("reject").get<bool>();
    if (!j.at("p_value").is_null()) o.p_value = number_from(j.at("p_value"));
    o.reference = reference_from(j.at("reference"));
    o.warnings = j.at("warnings").get<std::vector<std::string>>();
    return o;
}

json to_json(const RunReport& r) {
    json j;
    j["input"] = {{"path", r.input.path}, {"rows", r.input.rows}, {"cols", r.input.cols}, {"checksum", r.input.checksum}};
    j["method"] = std::string(to_string(r.outcome.method));
    j["options"] = r.options;
    j["outcome"] = to_json(r.outcome);
    j["decision"] = r.outcome.reject ? "reject" : "accept";
    if (r.wall_time_s) j["wall_time_s"] = *r.wall_time_s;
    return j;
}

RunReport report_from_json(const json& j) {
    RunReport r;
    const json& in = j.at("input");
    r.input.path = in.at("path").get<std::string>();
    r.input.rows = in.at("rows").get<int>();
    r.input.cols = in.at("cols").get<int>();
    r.input.checksum = in.at("checksum").get<std::string>();
    r.options = j.at("options");
    r.outcome = outcome_from_json(j.at("outcome"));
    if (j.at("decision").get<std::string>() != (r.outcome.reject ? "reject" : "accept")) {
        throw Error("report decision does not match the outcome");
    }
    if (j.contains("wall_time_s")) r.wall_time_s = j.at("wall_time_s").get<double>();
    return r;
}

std::string to_tsv(const RunReport& report) {
    std::ostringstream out;
    flatten(to_json(report), "", out);
    return out.str();
}

}  // namespace additivity
