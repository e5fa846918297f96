#pragma once

#include "additivity/outcome.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace additivity {

/// 64-bit FNV-1a digest, rendered as 16 lowercase hex digits.
std::string fnv1a64_hex(std::string_view bytes);

struct InputDigest {
    std::string path;
    int rows = 0;
    int cols = 0;
    std::string checksum;

    friend bool operator==(const InputDigest&, const InputDigest&) = default;
};

/// Machine-readable record of one `test` invocation.
struct RunReport {
    InputDigest input;
    nlohmann::json options = nlohmann::json::object();
    TestOutcome outcome;
    std::optional<double> wall_time_s;
};

nlohmann::json to_json(const TestOutcome& outcome);
TestOutcome outcome_from_json(const nlohmann::json& j);

nlohmann::json to_json(const MonteCarloCritical& cal);
MonteCarloCritical critical_from_json(const nlohmann::json& j);

nlohmann::json to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& j);

/// Flat key<TAB>value rendering of the JSON report.
std::string to_tsv(const RunReport& report);

}  // namespace additivity
