#include "additivity/outcome.hpp"

#include "additivity/errors.hpp"

#include <string>

namespace additivity {

std::string_view to_string(Method m) {
    switch (m) {
        case Method::tukey: return "tukey";
        case Method::mandel: return "mandel";
        case Method::johnson_graybill: return "johnson_graybill";
        case Method::lbi: return "lbi";
        case Method::tusell: return "tusell";
        case Method::modified_tukey: return "modified_tukey";
    }
    return "unknown";
}

std::string_view to_string(RejectionSide s) { return s == RejectionSide::high ? "high" : "low"; }

std::string_view to_string(Adjustment a) {
    switch (a) {
        case Adjustment::none: return "none";
        case Adjustment::permutation: return "permutation";
        case Adjustment::bootstrap: return "bootstrap";
    }
    return "unknown";
}

Method parse_method(std::string_view name) {
    if (name == "tukey") return Method::tukey;
    if (name == "mandel") return Method::mandel;
    if (name == "johnson_graybill" || name == "jg") return Method::johnson_graybill;
    if (name == "lbi") return Method::lbi;
    if (name == "tusell") return Method::tusell;
    if (name == "modified_tukey" || name == "mtukey" || name == "modified") return Method::modified_tukey;
    throw DomainError("unknown method '" + std::string(name) + "'");
}

Adjustment parse_adjustment(std::string_view name) {
    if (name == "none") return Adjustment::none;
    if (name == "perm" || name == "permutation") return Adjustment::permutation;
    if (name == "boot" || name == "bootstrap") return Adjustment::bootstrap;
    throw DomainError("unknown adjustment '" + std::string(name) + "'");
}

bool is_omnibus(Method m) {
    return m == Method::johnson_graybill || m == Method::lbi || m == Method::tusell;
}

RejectionSide rejection_side(Method m) {
    return m == Method::tusell ? RejectionSide::low : RejectionSide::high;
}

bool decide(double statistic, double critical_value, RejectionSide side) {
    return side == RejectionSide::high ? statistic > critical_value : statistic < critical_value;
}

}  // namespace additivity
