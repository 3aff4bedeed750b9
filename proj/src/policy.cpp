#include "ecoforge/policy.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "ecoforge/orchestrator.hpp"
#include "ecoforge/resolver.hpp"

namespace fs = std::filesystem;

namespace ecoforge {

const char* check_status_name(CheckStatus s) {
    switch (s) {
    case CheckStatus::verified: return "verified";
    case CheckStatus::attested: return "attested";
    case CheckStatus::failed: return "failed";
    case CheckStatus::not_applicable: return "not_applicable";
    }
    return "?";
}

std::optional<CheckStatus> parse_check_status(std::string_view text) {
    if (text == "verified") return CheckStatus::verified;
    if (text == "attested") return CheckStatus::attested;
    if (text == "failed") return CheckStatus::failed;
    if (text == "not_applicable") return CheckStatus::not_applicable;
    return std::nullopt;
}

AuditConfig AuditConfig::defaults() {
    AuditConfig cfg;
    cfg.m11_patterns = {"printf(",   "fprintf(stdout", "fprintf(stderr", "std::cout",
                        "std::cerr", "print *,",       "write(*"};
    cfg.m7_allowlist = {"BSD-2-Clause", "BSD-3-Clause", "MIT",      "Apache-2.0", "LGPL-2.1+",
                        "LGPL-3.0+",    "GPL-2.0+",     "GPL-3.0+", "MPL-2.0"};
    cfg.m3_exclude_dirs = {"tests", "examples", "docs"};
    cfg.memcheck_prefix = "valgrind --error-exitcode=1";
    return cfg;
}

AuditConfig AuditConfig::load_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::io_error, "cannot read audit config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::parse_error,
                    "audit config is not valid JSON: " + std::string(e.what()));
    }
    AuditConfig cfg = defaults();
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const std::string& key = it.key();
        if (key == "m11_patterns")
            cfg.m11_patterns = it->get<std::vector<std::string>>();
        else if (key == "m7_allowlist")
            cfg.m7_allowlist = it->get<std::vector<std::string>>();
        else if (key == "m3_exclude_dirs")
            cfg.m3_exclude_dirs = it->get<std::vector<std::string>>();
        else if (key == "memcheck_prefix")
            cfg.memcheck_prefix = it->get<std::string>();
        else
            throw Error(ErrorKind::schema_error, "audit config: unknown key \"" + key + "\"");
    }
    return cfg;
}

namespace {

const std::set<std::string> source_extensions = {".c", ".h", ".cc", ".cpp",
                                                 ".hpp", ".f", ".f90"};

bool path_excluded(const fs::path& rel, const std::vector<std::string>& exclude_dirs) {
    for (const auto& part : rel.parent_path()) {
        if (std::find(exclude_dirs.begin(), exclude_dirs.end(), part.string()) !=
            exclude_dirs.end())
            return true;
    }
    return false;
}

std::vector<fs::path> collect_source_files(const fs::path& root,
                                           const std::vector<std::string>& exclude_dirs) {
    std::vector<fs::path> out;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file())
            continue;
        if (!source_extensions.count(entry.path().extension().string()))
            continue;
        if (path_excluded(fs::relative(entry.path(), root), exclude_dirs))
            continue;
        out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct ScanHit {
    std::string location; // "<rel>:<line>"
    std::string pattern;
};

std::vector<ScanHit> scan_sources(const fs::path& root,
                                  const std::vector<std::string>& exclude_dirs,
                                  const std::vector<std::string>& patterns) {
    std::vector<ScanHit> hits;
    for (const auto& file : collect_source_files(root, exclude_dirs)) {
        std::ifstream in(file);
        if (!in)
            throw Error(ErrorKind::io_error, "cannot read " + file.string());
        std::string line;
        int line_no = 0;
        const std::string rel = fs::relative(file, root).generic_string();
        while (std::getline(in, line)) {
            ++line_no;
            for (const auto& pattern : patterns) {
                if (line.find(pattern) != std::string::npos)
                    hits.push_back({rel + ":" + std::to_string(line_no), pattern});
            }
        }
    }
    return hits;
}

// Searches the whole source tree (no exclusions) for a symbol; returns the
// first location or nullopt.
std::optional<std::string> find_symbol(const fs::path& root, const std::string& symbol) {
    for (const auto& file : collect_source_files(root, {})) {
        std::ifstream in(file);
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find(symbol) != std::string::npos)
                return fs::relative(file, root).generic_string() + ":" +
                       std::to_string(line_no);
        }
    }
    return std::nullopt;
}

std::vector<std::string> read_export_list(const fs::path& exports_file) {
    std::ifstream in(exports_file);
    if (!in)
        throw Error(ErrorKind::io_error, "cannot read " + exports_file.string());
    std::vector<std::string> symbols;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
            line.pop_back();
        if (!line.empty())
            symbols.push_back(line);
    }
    return symbols;
}

bool looks_like_email(const std::string& text) {
    const size_t at = text.find('@');
    if (at == std::string::npos || at == 0 || at + 1 >= text.size())
        return false;
    if (text.find('@', at + 1) != std::string::npos || text.find(' ') != std::string::npos)
        return false;
    return text.find('.', at + 1) != std::string::npos;
}

bool looks_like_url(const std::string& text) {
    return text.rfind("http://", 0) == 0 || text.rfind("https://", 0) == 0;
}

PolicyCheckResult make_result(PolicyId policy, CheckStatus status,
                              std::vector<std::string> evidence) {
    return {policy, status, policy_severity(policy), std::move(evidence)};
}

// Degrades a check that cannot run: attested if the manifest carries an
// attestation for the policy, else failed.
PolicyCheckResult attested_or_failed(PolicyId policy, const AuditContext& ctx,
                                     std::vector<std::string> failure_evidence) {
    if (ctx.manifest.has_attestation(policy_id_text(policy)))
        return make_result(policy, CheckStatus::attested, {});
    return make_result(policy, CheckStatus::failed, std::move(failure_evidence));
}

bool template_wires_required_deps(const PackageManifest& m, std::vector<std::string>* issues) {
    bool ok = true;
    for (const auto& dep : m.dependencies) {
        if (dep.kind != DependencyKind::required)
            continue;
        const std::string placeholder = "{dep_dir:" + dep.name + "}";
        if (m.build.configure_command.find(placeholder) == std::string::npos) {
            ok = false;
            if (issues)
                issues->push_back("required dependency " + dep.name + " not wired via " +
                                  placeholder);
        }
    }
    return ok;
}

CommandResult run_declared_command(const AuditContext& ctx, const std::string& command) {
    try {
        return ctx.executor->run(ctx.manifest.name, command, ctx.source_root);
    } catch (const Error&) {
        throw; // launch failures stay execution-error, distinct from exit != 0
    }
}

std::string first_line(const std::string& text) {
    const size_t nl = text.find('\n');
    return nl == std::string::npos ? text : text.substr(0, nl);
}

PolicyCheckResult check_m1(const AuditContext& ctx) {
    const BuildSpec& build = ctx.manifest.build;
    if (build.system == "script")
        return attested_or_failed(PolicyId::M1, ctx,
                                  {"script build system does not support the standard options"});
    std::vector<std::string> issues;
    if (build.configure_command.find("{prefix}") == std::string::npos)
        issues.push_back("configure template does not reference {prefix}");
    template_wires_required_deps(ctx.manifest, &issues);
    if (!issues.empty())
        return make_result(PolicyId::M1, CheckStatus::failed, std::move(issues));
    return make_result(PolicyId::M1, CheckStatus::verified,
                       {"build system " + build.system + " exposes the standard options"});
}

PolicyCheckResult check_m2(const AuditContext& ctx) {
    const std::string& cmd = ctx.manifest.test_command;
    if (cmd.empty())
        return make_result(PolicyId::M2, CheckStatus::failed, {"test_command not declared"});
    if (ctx.mode == AuditMode::static_only)
        return make_result(PolicyId::M2, CheckStatus::verified, {"test_command declared: " + cmd});
    const CommandResult r = run_declared_command(ctx, cmd);
    if (r.exit_code == 0)
        return make_result(PolicyId::M2, CheckStatus::verified, {"test suite exited 0"});
    return make_result(PolicyId::M2, CheckStatus::failed,
                       {"test suite exited " + std::to_string(r.exit_code),
                        "output: " + first_line(r.output)});
}

PolicyCheckResult check_m3(const AuditContext& ctx) {
    const auto hits = scan_sources(ctx.source_root, ctx.config.m3_exclude_dirs,
                                   {"MPI_COMM_WORLD"});
    if (hits.empty())
        return make_result(PolicyId::M3, CheckStatus::verified,
                           {"no MPI_COMM_WORLD occurrences outside excluded directories"});
    std::vector<std::string> evidence;
    for (const auto& hit : hits)
        evidence.push_back(hit.location);
    return make_result(PolicyId::M3, CheckStatus::failed, std::move(evidence));
}

PolicyCheckResult check_m5(const AuditContext& ctx) {
    const std::string& contact = ctx.manifest.contact;
    if (looks_like_email(contact) || looks_like_url(contact))
        return make_result(PolicyId::M5, CheckStatus::verified, {"contact: " + contact});
    return make_result(PolicyId::M5, CheckStatus::failed,
                       {"contact is neither an email address nor an http(s) URL: \"" + contact +
                        "\""});
}

PolicyCheckResult check_m7(const AuditContext& ctx) {
    const std::string& license = ctx.manifest.license;
    const auto& allow = ctx.config.m7_allowlist;
    if (std::find(allow.begin(), allow.end(), license) != allow.end())
        return make_result(PolicyId::M7, CheckStatus::verified,
                           {"license " + license + " is in the open-source allowlist"});
    return make_result(PolicyId::M7, CheckStatus::failed,
                       {"license \"" + license + "\" is not in the open-source allowlist"});
}

PolicyCheckResult check_m8(const AuditContext& ctx) {
    const std::string& symbol = ctx.manifest.version_api;
    if (symbol.empty())
        return make_result(PolicyId::M8, CheckStatus::failed, {"version_api not declared"});

    const fs::path exports_file = ctx.source_root / "exports.txt";
    if (fs::exists(exports_file)) {
        for (const auto& exported : read_export_list(exports_file)) {
            if (exported == symbol)
                return make_result(PolicyId::M8, CheckStatus::verified,
                                   {"version API " + symbol + " listed in exports.txt"});
        }
    }
    if (auto where = find_symbol(ctx.source_root, symbol))
        return make_result(PolicyId::M8, CheckStatus::verified,
                           {"version API " + symbol + " found at " + *where});
    return make_result(PolicyId::M8, CheckStatus::failed,
                       {"declared version API " + symbol +
                        " not found in source tree or export list"});
}

PolicyCheckResult check_m9(const AuditContext& ctx) {
    const fs::path exports_file = ctx.source_root / "exports.txt";
    if (!fs::exists(exports_file))
        return attested_or_failed(PolicyId::M9, ctx,
                                  {"exports.txt not present",
                                   "not checkable in this mode and not attested"});

    const auto& prefixes = ctx.manifest.namespace_prefixes;
    auto carries_prefix = [&](const std::string& name) {
        return std::any_of(prefixes.begin(), prefixes.end(), [&](const std::string& p) {
            return name.rfind(p, 0) == 0;
        });
    };

    std::vector<std::string> violations;
    const auto symbols = read_export_list(exports_file);
    for (const auto& symbol : symbols) {
        if (!carries_prefix(symbol))
            violations.push_back("symbol without declared prefix: " + symbol);
    }
    if (ctx.install_prefix) {
        const fs::path include_dir = *ctx.install_prefix / "include";
        if (fs::exists(include_dir)) {
            std::vector<fs::path> headers;
            for (const auto& entry : fs::recursive_directory_iterator(include_dir)) {
                if (entry.is_regular_file())
                    headers.push_back(entry.path());
            }
            std::sort(headers.begin(), headers.end());
            for (const auto& header : headers) {
                if (!carries_prefix(header.filename().string()))
                    violations.push_back("installed header without declared prefix: " +
                                         header.filename().string());
            }
        }
    }
    if (!violations.empty())
        return make_result(PolicyId::M9, CheckStatus::failed, std::move(violations));
    return make_result(PolicyId::M9, CheckStatus::verified,
                       {std::to_string(symbols.size()) +
                        " exported symbols carry declared prefixes"});
}

PolicyCheckResult check_m10(const AuditContext& ctx) {
    if (!ctx.manifest.repo_url.empty())
        return make_result(PolicyId::M10, CheckStatus::verified,
                           {"repository: " + ctx.manifest.repo_url});
    return make_result(PolicyId::M10, CheckStatus::failed, {"repo_url not declared"});
}

PolicyCheckResult check_m11(const AuditContext& ctx) {
    const auto hits = scan_sources(ctx.source_root, {"tests", "examples"}, ctx.config.m11_patterns);
    if (hits.empty())
        return make_result(PolicyId::M11, CheckStatus::verified,
                           {"no hardwired print or IO patterns outside tests/ and examples/"});
    std::vector<std::string> evidence;
    for (const auto& hit : hits)
        evidence.push_back(hit.location + ": " + hit.pattern);
    return make_result(PolicyId::M11, CheckStatus::failed, std::move(evidence));
}

PolicyCheckResult check_m12(const AuditContext& ctx) {
    std::vector<std::string> issues;
    for (const auto& dep : ctx.manifest.dependencies) {
        for (const char* base : {"third_party", "external"}) {
            const fs::path vendored = ctx.source_root / base / dep.name;
            if (fs::exists(vendored) && fs::is_directory(vendored))
                issues.push_back("vendored dependency: " + std::string(base) + "/" + dep.name);
        }
    }
    template_wires_required_deps(ctx.manifest, &issues);
    if (!issues.empty())
        return make_result(PolicyId::M12, CheckStatus::failed, std::move(issues));
    return make_result(PolicyId::M12, CheckStatus::verified,
                       {"no vendored copies; dependencies come from outside install dirs"});
}

PolicyCheckResult check_m13(const AuditContext& ctx) {
    if (!ctx.install_prefix)
        return attested_or_failed(PolicyId::M13, ctx,
                                  {"not checkable in this mode and not attested"});
    auto violations = check_install_layout(*ctx.install_prefix);
    if (!violations.empty())
        return make_result(PolicyId::M13, CheckStatus::failed, std::move(violations));
    return make_result(PolicyId::M13, CheckStatus::verified,
                       {"headers under include/ and libraries under lib/"});
}

PolicyCheckResult check_m14(const AuditContext& ctx) {
    if (!ctx.manifest.build.supports_64bit)
        return make_result(PolicyId::M14, CheckStatus::failed, {"supports_64bit is false"});
    std::vector<std::string> evidence{"supports_64bit declared true"};
    if (ctx.mode == AuditMode::execute &&
        ctx.manifest.build.configure_command.find("{64bit}") != std::string::npos)
        evidence.push_back("configure template expands {64bit}");
    return make_result(PolicyId::M14, CheckStatus::verified, std::move(evidence));
}

PolicyCheckResult check_r1(const AuditContext& ctx) {
    if (ctx.manifest.repo_public)
        return make_result(PolicyId::R1, CheckStatus::verified, {"repository declared public"});
    return make_result(PolicyId::R1, CheckStatus::failed, {"repo_public is false"});
}

PolicyCheckResult check_r2(const AuditContext& ctx) {
    if (ctx.mode == AuditMode::static_only)
        return attested_or_failed(PolicyId::R2, ctx,
                                  {"not checkable in this mode and not attested"});
    if (ctx.manifest.test_command.empty())
        return make_result(PolicyId::R2, CheckStatus::failed, {"test_command not declared"});
    const std::string command = ctx.config.memcheck_prefix + " " + ctx.manifest.test_command;
    const CommandResult r = run_declared_command(ctx, command);
    if (r.exit_code == 0)
        return make_result(PolicyId::R2, CheckStatus::verified,
                           {"test suite clean under the memory checker"});
    return make_result(PolicyId::R2, CheckStatus::failed,
                       {"memory-checked test suite exited " + std::to_string(r.exit_code)});
}

PolicyCheckResult check_r3(const AuditContext& ctx) {
    const std::string& doc = ctx.manifest.error_handling_doc;
    if (doc.empty())
        return make_result(PolicyId::R3, CheckStatus::failed, {"error_handling_doc not declared"});
    if (fs::exists(ctx.source_root / doc))
        return make_result(PolicyId::R3, CheckStatus::verified,
                           {"error handling documented in " + doc});
    return make_result(PolicyId::R3, CheckStatus::failed,
                       {"error_handling_doc points to missing file: " + doc});
}

PolicyCheckResult check_r5(const AuditContext& ctx) {
    if (!ctx.registry)
        return attested_or_failed(PolicyId::R5, ctx,
                                  {"not checkable in this mode and not attested"});
    const PackageManifest& m = ctx.manifest;
    try {
        VersionConstraint pin;
        pin.comparators.push_back({ComparatorOp::eq, m.version});
        const ResolutionResult res = resolve(*ctx.registry, {{m.name, pin}});
        if (!res.solved())
            return make_result(PolicyId::R5, CheckStatus::failed,
                               {"dependency metadata is unresolvable",
                                first_line(explain_conflict(*res.conflict))});
        const auto deps = export_dependency_list(res, m.name);
        if (deps.empty())
            return make_result(PolicyId::R5, CheckStatus::verified,
                               {"dependency export: (none)"});
        std::string listing = "dependency export:";
        for (const auto& [name, version] : deps)
            listing += " " + name + " " + version.str();
        return make_result(PolicyId::R5, CheckStatus::verified, {listing});
    } catch (const Error& e) {
        return make_result(PolicyId::R5, CheckStatus::failed, {e.what()});
    }
}

void check_context(const AuditContext& ctx) {
    std::error_code ec;
    if (!fs::exists(ctx.source_root, ec) || !fs::is_directory(ctx.source_root, ec))
        throw Error(ErrorKind::io_error,
                    "source root is not a readable directory: " + ctx.source_root.string());
    if (ctx.mode == AuditMode::execute) {
        if (!ctx.install_prefix)
            throw Error(ErrorKind::invalid_input, "execute mode requires an install prefix");
        if (!ctx.executor)
            throw Error(ErrorKind::invalid_input, "execute mode requires a command executor");
    }
}

} // namespace

PolicyCheckResult run_policy_check(PolicyId policy, const AuditContext& ctx) {
    check_context(ctx);
    switch (policy) {
    case PolicyId::M1: return check_m1(ctx);
    case PolicyId::M2: return check_m2(ctx);
    case PolicyId::M3: return check_m3(ctx);
    case PolicyId::M4:
        return attested_or_failed(PolicyId::M4, ctx,
                                  {"not machine-checkable and not attested"});
    case PolicyId::M5: return check_m5(ctx);
    case PolicyId::M6:
        return attested_or_failed(PolicyId::M6, ctx,
                                  {"not machine-checkable and not attested"});
    case PolicyId::M7: return check_m7(ctx);
    case PolicyId::M8: return check_m8(ctx);
    case PolicyId::M9: return check_m9(ctx);
    case PolicyId::M10: return check_m10(ctx);
    case PolicyId::M11: return check_m11(ctx);
    case PolicyId::M12: return check_m12(ctx);
    case PolicyId::M13: return check_m13(ctx);
    case PolicyId::M14: return check_m14(ctx);
    case PolicyId::R1: return check_r1(ctx);
    case PolicyId::R2: return check_r2(ctx);
    case PolicyId::R3: return check_r3(ctx);
    case PolicyId::R4:
        return attested_or_failed(PolicyId::R4, ctx,
                                  {"not machine-checkable and not attested"});
    case PolicyId::R5: return check_r5(ctx);
    }
    throw Error(ErrorKind::invalid_input, "unknown policy id");
}

ComplianceReport audit_package(const AuditContext& ctx) {
    check_context(ctx);
    ComplianceReport report;
    report.package = ctx.manifest.name;
    report.version = ctx.manifest.version;
    for (PolicyId policy : all_policy_ids)
        report.results.push_back(run_policy_check(policy, ctx));

    report.xsdk_compatible = true;
    for (const auto& r : report.results) {
        if (r.severity == PolicySeverity::mandatory && r.status != CheckStatus::verified &&
            r.status != CheckStatus::attested)
            report.xsdk_compatible = false;
    }
    return report;
}

std::string render_report(const ComplianceReport& report, ReportFormat format) {
    if (format == ReportFormat::json)
        return report_to_json(report).dump(2) + "\n";

    std::ostringstream out;
    out << "package: " << report.package << " " << report.version.str() << "\n";
    for (const auto& r : report.results) {
        std::string id = policy_id_text(r.policy);
        id.resize(5, ' ');
        std::string status = check_status_name(r.status);
        status.resize(16, ' ');
        std::string evidence;
        if (!r.evidence.empty())
            evidence = r.evidence.front();
        else if (r.status == CheckStatus::attested)
            evidence = "(see manifest)";
        out << id << status << evidence << "\n";
    }
    out << "xsdk compatible: " << (report.xsdk_compatible ? "yes" : "no") << "\n";
    return out.str();
}

json report_to_json(const ComplianceReport& report) {
    json results = json::array();
    for (const auto& r : report.results) {
        results.push_back(
            {{"policy", policy_id_text(r.policy)},
             {"status", check_status_name(r.status)},
             {"severity",
              r.severity == PolicySeverity::mandatory ? "mandatory" : "recommended"},
             {"evidence", r.evidence}});
    }
    return json{{"package", {{"name", report.package}, {"version", report.version.str()}}},
                {"results", results},
                {"xsdk_compatible", report.xsdk_compatible}};
}

ComplianceReport report_from_json(const json& doc) {
    ComplianceReport report;
    try {
        report.package = doc.at("package").at("name").get<std::string>();
        report.version = parse_version(doc.at("package").at("version").get<std::string>());
        for (const json& r : doc.at("results")) {
            PolicyCheckResult result;
            const auto policy = parse_policy_id(r.at("policy").get<std::string>());
            const auto status = parse_check_status(r.at("status").get<std::string>());
            if (!policy || !status)
                throw Error(ErrorKind::schema_error, "report carries an unknown policy or status");
            result.policy = *policy;
            result.status = *status;
            result.severity = policy_severity(*policy);
            result.evidence = r.at("evidence").get<std::vector<std::string>>();
            report.results.push_back(std::move(result));
        }
        report.xsdk_compatible = doc.at("xsdk_compatible").get<bool>();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::schema_error, "malformed compliance report: " + std::string(e.what()));
    }
    return report;
}

} // namespace ecoforge
