#pragma once

#include <stdexcept>
#include <string>

namespace cwcs {

enum class ThresholdPolicy {
    Zero,             // theta_n = 0, conventional sign detector
    PreFilterRegroup, // return-map regrouping on the unfiltered received map
    SuboptimalPast,   // theta = past-ISI estimate from decided symbols
    OptimalGenie,     // theta = full ISI from true past and future symbols
};

inline std::string to_string(ThresholdPolicy p) {
    switch (p) {
        case ThresholdPolicy::Zero: return "zero";
        case ThresholdPolicy::PreFilterRegroup: return "prefilter";
        case ThresholdPolicy::SuboptimalPast: return "subopt";
        case ThresholdPolicy::OptimalGenie: return "genie";
    }
    throw std::logic_error("to_string: unknown ThresholdPolicy");
}

inline ThresholdPolicy policy_from_string(const std::string& s) {
    if (s == "zero") return ThresholdPolicy::Zero;
    if (s == "prefilter") return ThresholdPolicy::PreFilterRegroup;
    if (s == "subopt") return ThresholdPolicy::SuboptimalPast;
    if (s == "genie") return ThresholdPolicy::OptimalGenie;
    throw std::invalid_argument("unknown threshold policy '" + s +
                                "' (expected zero|prefilter|subopt|genie)");
}

}  // namespace cwcs
