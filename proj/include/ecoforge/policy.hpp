#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ecoforge/executor.hpp"
#include "ecoforge/manifest.hpp"
#include "ecoforge/policy_id.hpp"
#include "ecoforge/registry.hpp"

namespace ecoforge {

enum class CheckStatus { verified, attested, failed, not_applicable };

const char* check_status_name(CheckStatus s);
std::optional<CheckStatus> parse_check_status(std::string_view text);

enum class AuditMode { static_only, execute };

/// Tool configuration (audit.config.json): pattern and allowlist overrides.
struct AuditConfig {
    std::vector<std::string> m11_patterns;
    std::vector<std::string> m7_allowlist;
    std::vector<std::string> m3_exclude_dirs;
    std::string memcheck_prefix;

    static AuditConfig defaults();
    static AuditConfig load_file(const std::filesystem::path& path);
};

/// Everything a policy check may look at. Static mode never executes
/// package code; execute mode requires an install prefix and an executor.
struct AuditContext {
    PackageManifest manifest;
    std::filesystem::path source_root;
    std::optional<std::filesystem::path> install_prefix;
    AuditMode mode = AuditMode::static_only;
    const Registry* registry = nullptr;  // enables the R5 resolvability check
    CommandExecutor* executor = nullptr; // required in execute mode
    AuditConfig config = AuditConfig::defaults();
};

struct PolicyCheckResult {
    PolicyId policy;
    CheckStatus status = CheckStatus::failed;
    PolicySeverity severity = PolicySeverity::mandatory;
    std::vector<std::string> evidence;

    bool operator==(const PolicyCheckResult&) const = default;
};

struct ComplianceReport {
    std::string package;
    Version version;
    std::vector<PolicyCheckResult> results; // one per policy, sorted by id
    bool xsdk_compatible = false;           // every mandatory verified/attested

    bool operator==(const ComplianceReport&) const = default;
};

/// Evaluates one policy. Policy failure is a status, never an exception;
/// Error{io_error} signals an unreadable source root or install prefix.
PolicyCheckResult run_policy_check(PolicyId policy, const AuditContext& ctx);

/// Runs all 19 checks and assembles the report (sorted by policy id,
/// independent of check execution order).
ComplianceReport audit_package(const AuditContext& ctx);

enum class ReportFormat { text, json };

std::string render_report(const ComplianceReport& report, ReportFormat format);
json report_to_json(const ComplianceReport& report);
ComplianceReport report_from_json(const json& doc);

} // namespace ecoforge
