#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace ecoforge {

/// The 19 community policies: M1-M14 are mandatory, R1-R5 recommended.
enum class PolicyId {
    M1, M2, M3, M4, M5, M6, M7, M8, M9, M10, M11, M12, M13, M14,
    R1, R2, R3, R4, R5,
};

inline constexpr std::array<PolicyId, 19> all_policy_ids = {
    PolicyId::M1, PolicyId::M2,  PolicyId::M3,  PolicyId::M4,  PolicyId::M5,
    PolicyId::M6, PolicyId::M7,  PolicyId::M8,  PolicyId::M9,  PolicyId::M10,
    PolicyId::M11, PolicyId::M12, PolicyId::M13, PolicyId::M14,
    PolicyId::R1, PolicyId::R2,  PolicyId::R3,  PolicyId::R4,  PolicyId::R5,
};

enum class PolicySeverity { mandatory, recommended };

const char* policy_id_text(PolicyId id);
PolicySeverity policy_severity(PolicyId id);
std::optional<PolicyId> parse_policy_id(std::string_view text);

} // namespace ecoforge
