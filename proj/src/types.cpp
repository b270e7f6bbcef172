#include "robustbid/types.hpp"

#include <algorithm>
#include <stdexcept>

namespace robustbid {

const char* to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::NonRobust: return "nonrobust";
        case PolicyKind::Risk: return "risk";
        case PolicyKind::RobustCtr: return "robust_ctr";
        case PolicyKind::RobustCvr: return "robust_cvr";
        case PolicyKind::RobustJoint: return "robust_joint";
    }
    return "unknown";
}

std::optional<PolicyKind> parse_policy(std::string_view name) {
    if (name == "nonrobust") return PolicyKind::NonRobust;
    if (name == "risk") return PolicyKind::Risk;
    if (name == "robust_ctr") return PolicyKind::RobustCtr;
    if (name == "robust_cvr") return PolicyKind::RobustCvr;
    if (name == "robust_joint") return PolicyKind::RobustJoint;
    return std::nullopt;
}

void SimulationState::add_flag(const std::string& flag) {
    auto it = std::lower_bound(flags.begin(), flags.end(), flag);
    if (it == flags.end() || *it != flag) flags.insert(it, flag);
}

void validate_rates(const RateVector& rates, const char* what) {
    for (std::size_t i = 0; i < rates.size(); ++i) {
        if (!(rates[i] >= 0.0 && rates[i] <= 1.0)) {
            throw std::invalid_argument(std::string(what) + "[" + std::to_string(i) +
                                        "] = " + std::to_string(rates[i]) +
                                        " is outside [0, 1]");
        }
    }
}

}  // namespace robustbid
