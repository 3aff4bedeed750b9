#include "ecoforge/policy_id.hpp"

namespace ecoforge {

const char* policy_id_text(PolicyId id) {
    switch (id) {
    case PolicyId::M1: return "M1";
    case PolicyId::M2: return "M2";
    case PolicyId::M3: return "M3";
    case PolicyId::M4: return "M4";
    case PolicyId::M5: return "M5";
    case PolicyId::M6: return "M6";
    case PolicyId::M7: return "M7";
    case PolicyId::M8: return "M8";
    case PolicyId::M9: return "M9";
    case PolicyId::M10: return "M10";
    case PolicyId::M11: return "M11";
    case PolicyId::M12: return "M12";
    case PolicyId::M13: return "M13";
    case PolicyId::M14: return "M14";
    case PolicyId::R1: return "R1";
    case PolicyId::R2: return "R2";
    case PolicyId::R3: return "R3";
    case PolicyId::R4: return "R4";
    case PolicyId::R5: return "R5";
    }
    return "?";
}

PolicySeverity policy_severity(PolicyId id) {
    switch (id) {
    case PolicyId::R1:
    case PolicyId::R2:
    case PolicyId::R3:
    case PolicyId::R4:
    case PolicyId::R5:
        return PolicySeverity::recommended;
    default:
        return PolicySeverity::mandatory;
    }
}

std::optional<PolicyId> parse_policy_id(std::string_view text) {
    for (PolicyId id : all_policy_ids) {
        if (text == policy_id_text(id))
            return id;
    }
    return std::nullopt;
}

} // namespace ecoforge
