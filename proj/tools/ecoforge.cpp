#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ecoforge/interop.hpp"
#include "ecoforge/orchestrator.hpp"
#include "ecoforge/policy.hpp"
#include "ecoforge/release.hpp"
#include "ecoforge/resolver.hpp"

using namespace ecoforge;

namespace {

// Exit codes: 0 success, 1 operational failure (conflict, audit failure,
// violations), 2 usage error, 3 I/O or parse error.
constexpr int exit_ok = 0;
constexpr int exit_operational = 1;
constexpr int exit_usage = 2;
constexpr int exit_io = 3;

int exit_code_for(const Error& e) {
    switch (e.kind()) {
    case ErrorKind::unknown_package:
    case ErrorKind::cycle_error:
    case ErrorKind::version_regression:
    case ErrorKind::empty_plan:
        return exit_operational;
    case ErrorKind::malformed_version:
    case ErrorKind::malformed_constraint:
    case ErrorKind::invalid_input:
        return exit_usage;
    default:
        return exit_io;
    }
}

RootSpec parse_root_spec(const std::string& text) {
    const size_t at = text.find('@');
    if (at == std::string::npos)
        return {text, VersionConstraint::any()};
    return {text.substr(0, at), parse_constraint(text.substr(at + 1))};
}

std::vector<RootSpec> parse_roots(const std::vector<std::string>& roots) {
    std::vector<RootSpec> out;
    for (const auto& r : roots)
        out.push_back(parse_root_spec(r));
    return out;
}

Registry load_registry(const std::string& dir) {
    std::vector<std::string> warnings;
    Registry registry = Registry::ingest_directory(dir, &warnings);
    for (const auto& w : warnings)
        std::cerr << "warning: " << w << "\n";
    return registry;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::io_error, "cannot read " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::parse_error, path + " is not valid JSON: " + std::string(e.what()));
    }
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw Error(ErrorKind::io_error, "cannot write " + path);
    out << content;
}

AuditConfig audit_config_from_env() {
    if (const char* path = std::getenv("ECOFORGE_CONFIG"))
        return AuditConfig::load_file(path);
    return AuditConfig::defaults();
}

struct CommonArgs {
    std::string registry_dir;
    std::vector<std::string> roots;
    std::string format = "text";
};

int cmd_ingest(const CommonArgs& args) {
    const Registry registry = load_registry(args.registry_dir);
    if (args.format == "json") {
        json entries = json::array();
        for (const auto& name : registry.names()) {
            for (const auto& m : registry.versions_of(name))
                entries.push_back({{"name", name}, {"version", m.version.str()}});
        }
        std::cout << json{{"packages", registry.package_count()},
                          {"entries", registry.entry_count()},
                          {"manifests", entries}}
                         .dump(2)
                  << "\n";
    } else {
        std::cout << registry.package_count() << " packages, " << registry.entry_count()
                  << " entries\n";
    }
    return exit_ok;
}

int cmd_resolve(const CommonArgs& args, const std::string& lockfile_out) {
    const Registry registry = load_registry(args.registry_dir);
    const ResolutionResult res = resolve(registry, parse_roots(args.roots));
    if (!res.solved()) {
        std::cerr << explain_conflict(*res.conflict);
        return exit_operational;
    }
    const std::string lockfile = lockfile_to_json(res).dump(2) + "\n";
    if (!lockfile_out.empty())
        write_file(lockfile_out, lockfile);
    if (args.format == "json") {
        std::cout << lockfile;
    } else {
        for (const auto& [name, version] : build_order(res))
            std::cout << name << " " << version.str() << "\n";
    }
    return exit_ok;
}

int cmd_audit(const CommonArgs& args, const std::string& package_spec,
              const std::string& source_dir, const std::string& prefix_dir,
              const std::string& mode) {
    const Registry registry = load_registry(args.registry_dir);

    std::string name = package_spec;
    std::optional<Version> version;
    if (const size_t at = package_spec.find('@'); at != std::string::npos) {
        name = package_spec.substr(0, at);
        version = parse_version(package_spec.substr(at + 1));
    }

    AuditContext ctx;
    const auto& stored = registry.versions_of(name);
    ctx.manifest = version ? registry.find(name, *version) : stored.front();
    ctx.source_root = source_dir;
    if (!prefix_dir.empty())
        ctx.install_prefix = prefix_dir;
    ctx.mode = mode == "execute" ? AuditMode::execute : AuditMode::static_only;
    ctx.registry = &registry;
    ctx.config = audit_config_from_env();

    SystemExecutor executor;
    if (ctx.mode == AuditMode::execute)
        ctx.executor = &executor;

    const ComplianceReport report = audit_package(ctx);
    std::cout << render_report(report,
                               args.format == "json" ? ReportFormat::json : ReportFormat::text);
    return report.xsdk_compatible ? exit_ok : exit_operational;
}

int cmd_plan_release(const std::string& prev_path, const std::string& proposed_path,
                     const std::string& format) {
    const ReleaseSnapshot prev = snapshot_from_json(load_json_file(prev_path));
    const ReleaseSnapshot proposed = snapshot_from_json(load_json_file(proposed_path));
    const ReleasePlan plan = plan_release(prev, proposed.components);
    if (format == "json") {
        std::cout << plan_to_json(plan).dump(2) << "\n";
    } else {
        for (const auto& [name, bump] : plan.component_bumps) {
            if (bump != BumpLevel::none)
                std::cout << name << ": " << plan.previous.components.at(name).str() << " -> "
                          << plan.proposed_components.at(name).str() << " (" <<
                    bump_level_name(bump) << ")\n";
        }
        for (const auto& name : plan.additions)
            std::cout << name << ": added " << plan.proposed_components.at(name).str() << "\n";
        for (const auto& name : plan.removals)
            std::cout << name << ": removed\n";
        std::cout << "required level: " << bump_level_name(plan.required_level)
                  << ", next version: " << plan.proposed_sdk_version.str() << "\n";
    }
    return exit_ok;
}

int cmd_validate_release(const std::string& prev_path, const std::string& proposed_path,
                         const std::string& target_text, const std::string& format) {
    const auto target = parse_bump_level(target_text);
    if (!target)
        throw Error(ErrorKind::invalid_input, "unknown target level \"" + target_text + "\"");
    const ReleaseSnapshot prev = snapshot_from_json(load_json_file(prev_path));
    const ReleaseSnapshot proposed = snapshot_from_json(load_json_file(proposed_path));
    const auto violations = validate_release(plan_release(prev, proposed.components), *target);

    if (format == "json") {
        json out = json::array();
        for (const auto& v : violations)
            out.push_back(v.str());
        std::cout << json{{"target", target_text}, {"violations", out}}.dump(2) << "\n";
    } else if (violations.empty()) {
        std::cout << "release plan valid at target " << target_text << "\n";
    } else {
        for (const auto& v : violations)
            std::cout << v.str() << "\n";
    }
    return violations.empty() ? exit_ok : exit_operational;
}

int cmd_interop_report(const CommonArgs& args) {
    const Registry registry = load_registry(args.registry_dir);
    std::vector<RootSpec> roots = parse_roots(args.roots);
    if (roots.empty()) {
        for (const auto& name : registry.names())
            roots.push_back({name, VersionConstraint::any()});
    }
    const ResolutionResult res = resolve(registry, roots);
    if (!res.solved()) {
        std::cerr << explain_conflict(*res.conflict);
        return exit_operational;
    }
    const InteropMatrix matrix = build_interop_matrix(registry, res);
    if (args.format == "json")
        std::cout << matrix_to_json(matrix).dump(2) << "\n";
    else if (args.format == "dot")
        std::cout << render_matrix(matrix, MatrixFormat::dot);
    else
        std::cout << render_matrix(matrix, MatrixFormat::text);
    return exit_ok;
}

int cmd_export_deps(const CommonArgs& args, const std::string& package) {
    const Registry registry = load_registry(args.registry_dir);
    const std::vector<RootSpec> roots = parse_roots(args.roots);
    const ResolutionResult res = resolve(registry, roots);
    if (!res.solved()) {
        std::cerr << explain_conflict(*res.conflict);
        return exit_operational;
    }
    const std::string target = package.empty() ? roots.front().name : package;
    const auto deps = export_dependency_list(res, target);
    if (args.format == "json") {
        json out = json::array();
        for (const auto& [name, version] : deps)
            out.push_back({{"name", name}, {"version", version.str()}});
        std::cout << out.dump(2) << "\n";
    } else {
        for (const auto& [name, version] : deps)
            std::cout << name << " " << version.str() << "\n";
    }
    return exit_ok;
}

int cmd_build(const CommonArgs& args, const std::string& lockfile_in,
              const std::string& prefix_dir, bool debug, bool shared, bool use_64bit, int jobs,
              bool dry_run, const std::string& workdir) {
    const Registry registry = load_registry(args.registry_dir);
    ResolutionResult res;
    if (!lockfile_in.empty()) {
        res = resolution_from_lockfile(load_json_file(lockfile_in), registry);
    } else {
        if (args.roots.empty())
            throw Error(ErrorKind::invalid_input, "build needs --root or --lockfile");
        res = resolve(registry, parse_roots(args.roots));
        if (!res.solved()) {
            std::cerr << explain_conflict(*res.conflict);
            return exit_operational;
        }
    }

    BuildConfig cfg;
    cfg.prefix = std::filesystem::absolute(prefix_dir);
    cfg.debug = debug;
    cfg.shared_libs = shared;
    cfg.use_64bit = use_64bit;
    cfg.parallelism = jobs;
    const BuildPlan plan = generate_build_plan(res, registry, cfg);

    if (dry_run) {
        for (const auto& step : plan.steps) {
            for (const std::string* cmd :
                 {&step.configure_command, &step.build_command, &step.install_command}) {
                if (!cmd->empty())
                    std::cout << step.package << "\t" << *cmd << "\n";
            }
        }
        return exit_ok;
    }

    SystemExecutor executor;
    const BuildOutcome outcome = execute_plan(plan, executor, std::filesystem::path(workdir));
    for (const auto& step : plan.steps) {
        const StepOutcome& s = outcome.steps.at(step.package);
        std::cout << step.package << " " << step.version.str() << ": "
                  << step_status_name(s.status);
        if (!s.log_path.empty())
            std::cout << " (" << s.log_path << ")";
        std::cout << "\n";
    }
    return outcome.all_succeeded() ? exit_ok : exit_operational;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ecoforge - package manager and compliance toolchain for scientific "
                 "software ecosystems"};
    app.require_subcommand(1);

    CommonArgs common;

    auto add_format = [&](CLI::App* cmd, bool with_dot = false) {
        auto values = with_dot ? std::vector<std::string>{"text", "json", "dot"}
                               : std::vector<std::string>{"text", "json"};
        cmd->add_option("--format", common.format, "Output format")
            ->check(CLI::IsMember(values));
    };

    auto* ingest = app.add_subcommand("ingest", "Load and index a registry directory");
    ingest->add_option("--registry", common.registry_dir, "Registry root directory")->required();
    add_format(ingest);

    auto* resolve_cmd = app.add_subcommand("resolve", "Resolve roots to one version per package");
    resolve_cmd->add_option("--registry", common.registry_dir)->required();
    resolve_cmd->add_option("--root", common.roots, "Root package, name[@constraint]")
        ->required()
        ->take_all();
    std::string lockfile_out;
    resolve_cmd->add_option("--lockfile", lockfile_out, "Write xsdk.lock.json here");
    add_format(resolve_cmd);

    auto* audit = app.add_subcommand("audit", "Audit one package against the community policies");
    audit->add_option("--registry", common.registry_dir)->required();
    std::string package_spec, source_dir, prefix_dir, mode = "static";
    audit->add_option("--package", package_spec, "Package, name[@version]")->required();
    audit->add_option("--source", source_dir, "Package source root")->required();
    audit->add_option("--prefix", prefix_dir, "Install prefix to verify");
    audit->add_option("--mode", mode)->check(CLI::IsMember({"static", "execute"}));
    add_format(audit);

    auto* plan_cmd = app.add_subcommand("plan-release", "Plan a coordinated release");
    std::string prev_path, proposed_path, target_level = "patch";
    plan_cmd->add_option("--prev", prev_path, "Previous release snapshot")->required();
    plan_cmd->add_option("--proposed", proposed_path, "Proposed release snapshot")->required();
    add_format(plan_cmd);

    auto* validate_cmd =
        app.add_subcommand("validate-release", "Validate a plan against a target level");
    validate_cmd->add_option("--prev", prev_path)->required();
    validate_cmd->add_option("--proposed", proposed_path)->required();
    validate_cmd->add_option("--target", target_level, "patch|minor|major")->required();
    add_format(validate_cmd);

    auto* interop_cmd = app.add_subcommand("interop-report", "Interoperability matrix report");
    interop_cmd->add_option("--registry", common.registry_dir)->required();
    interop_cmd->add_option("--root", common.roots, "Roots (default: every package)")->take_all();
    add_format(interop_cmd, /*with_dot=*/true);

    auto* export_cmd = app.add_subcommand("export-deps", "Export ordered dependency list");
    export_cmd->add_option("--registry", common.registry_dir)->required();
    export_cmd->add_option("--root", common.roots)->required()->take_all();
    std::string export_package;
    export_cmd->add_option("--package", export_package, "Package to export (default: first root)");
    add_format(export_cmd);

    auto* build_cmd = app.add_subcommand("build", "Generate and run a coordinated build plan");
    build_cmd->add_option("--registry", common.registry_dir)->required();
    build_cmd->add_option("--root", common.roots)->take_all();
    std::string lockfile_in, build_prefix, workdir = ".";
    bool debug = false, shared = false, use_64bit = false, dry_run = true;
    int jobs = 1;
    build_cmd->add_option("--lockfile", lockfile_in, "Resolve from an existing lockfile");
    build_cmd->add_option("--prefix", build_prefix, "Install prefix root")->required();
    build_cmd->add_flag("--debug", debug, "Debug build");
    build_cmd->add_flag("--shared", shared, "Build shared libraries");
    build_cmd->add_flag("--64bit", use_64bit, "Use 64-bit indices");
    build_cmd->add_option("--jobs", jobs, "Parallel build steps")->check(CLI::PositiveNumber);
    build_cmd->add_flag("--dry-run,!--no-dry-run", dry_run, "Print commands without running");
    build_cmd->add_option("--workdir", workdir, "Where build logs go");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return app.exit(e);
        app.exit(e);
        return exit_usage;
    }

    try {
        if (ingest->parsed())
            return cmd_ingest(common);
        if (resolve_cmd->parsed())
            return cmd_resolve(common, lockfile_out);
        if (audit->parsed())
            return cmd_audit(common, package_spec, source_dir, prefix_dir, mode);
        if (plan_cmd->parsed())
            return cmd_plan_release(prev_path, proposed_path, common.format);
        if (validate_cmd->parsed())
            return cmd_validate_release(prev_path, proposed_path, target_level, common.format);
        if (interop_cmd->parsed())
            return cmd_interop_report(common);
        if (export_cmd->parsed())
            return cmd_export_deps(common, export_package);
        if (build_cmd->parsed())
            return cmd_build(common, lockfile_in, build_prefix, debug, shared, use_64bit, jobs,
                             dry_run, workdir);
    } catch (const Error& e) {
        std::cerr << "error (" << error_kind_name(e.kind()) << "): " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_io;
    }
    return exit_usage;
}
