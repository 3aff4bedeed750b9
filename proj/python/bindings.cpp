#include <pybind11/functional.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ecoforge/interop.hpp"
#include "ecoforge/orchestrator.hpp"
#include "ecoforge/policy.hpp"
#include "ecoforge/release.hpp"
#include "ecoforge/resolver.hpp"

namespace py = pybind11;
using namespace ecoforge;

namespace {

// Lets Python implement the executor interface (dry-run recorders, fakes).
class PyCommandExecutor : public CommandExecutor {
public:
    using CommandExecutor::CommandExecutor;
    CommandResult run(const std::string& package, const std::string& command,
                      const std::filesystem::path& workdir) override {
        PYBIND11_OVERRIDE_PURE(CommandResult, CommandExecutor, run, package, command, workdir);
    }
};

std::vector<RootSpec> roots_from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs) {
    std::vector<RootSpec> roots;
    for (const auto& [name, constraint] : pairs)
        roots.push_back({name, parse_constraint(constraint)});
    return roots;
}

BumpLevel bump_from_text(const std::string& text) {
    const auto level = parse_bump_level(text);
    if (!level)
        throw Error(ErrorKind::invalid_input, "unknown bump level \"" + text + "\"");
    return *level;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Package manager and compliance toolchain for scientific software ecosystems";

    py::register_exception<Error>(m, "EcoforgeError");

    // ------------------------------------------------------------------ versions
    py::class_<Version>(m, "Version")
        .def(py::init<int, int, int, std::string>(), py::arg("major"), py::arg("minor"),
             py::arg("patch"), py::arg("prerelease") = "")
        .def_readonly("major", &Version::major)
        .def_readonly("minor", &Version::minor)
        .def_readonly("patch", &Version::patch)
        .def_readonly("prerelease", &Version::prerelease)
        .def("__str__", &Version::str)
        .def("__repr__", [](const Version& v) { return "Version('" + v.str() + "')"; })
        .def("__hash__", [](const Version& v) { return py::hash(py::str(v.str())); })
        .def(py::self == py::self)
        .def(py::self != py::self)
        .def(py::self < py::self)
        .def(py::self <= py::self)
        .def(py::self > py::self)
        .def(py::self >= py::self);
    m.def("parse_version", [](const std::string& text) { return parse_version(text); });

    py::class_<VersionConstraint>(m, "VersionConstraint")
        .def_static("any", &VersionConstraint::any)
        .def("is_any", &VersionConstraint::is_any)
        .def("satisfied_by", &VersionConstraint::satisfied_by)
        .def("__str__", &VersionConstraint::str)
        .def("__repr__",
             [](const VersionConstraint& c) { return "VersionConstraint('" + c.str() + "')"; })
        .def(py::self == py::self);
    m.def("parse_constraint", [](const std::string& text) { return parse_constraint(text); });
    m.def("constraint_satisfied", &constraint_satisfied);

    // ----------------------------------------------------------------- manifests
    py::class_<Dependency>(m, "Dependency")
        .def_readonly("name", &Dependency::name)
        .def_readonly("constraint", &Dependency::constraint)
        .def_property_readonly("kind", [](const Dependency& d) {
            return d.kind == DependencyKind::required ? "required" : "optional";
        });

    py::class_<InteropDeclaration>(m, "InteropDeclaration")
        .def_readonly("peer", &InteropDeclaration::peer)
        .def_readonly("level", &InteropDeclaration::level)
        .def_readonly("direction", &InteropDeclaration::direction)
        .def_readonly("mechanism", &InteropDeclaration::mechanism);

    py::class_<BuildSpec>(m, "BuildSpec")
        .def_readonly("system", &BuildSpec::system)
        .def_readonly("configure_command", &BuildSpec::configure_command)
        .def_readonly("build_command", &BuildSpec::build_command)
        .def_readonly("install_command", &BuildSpec::install_command)
        .def_readonly("supports_64bit", &BuildSpec::supports_64bit)
        .def_readonly("supports_shared", &BuildSpec::supports_shared);

    py::class_<PackageManifest>(m, "PackageManifest")
        .def_readonly("name", &PackageManifest::name)
        .def_readonly("version", &PackageManifest::version)
        .def_readonly("license", &PackageManifest::license)
        .def_readonly("contact", &PackageManifest::contact)
        .def_readonly("repo_url", &PackageManifest::repo_url)
        .def_readonly("repo_public", &PackageManifest::repo_public)
        .def_readonly("dependencies", &PackageManifest::dependencies)
        .def_readonly("build", &PackageManifest::build)
        .def_readonly("namespace_prefixes", &PackageManifest::namespace_prefixes)
        .def_readonly("test_command", &PackageManifest::test_command)
        .def_readonly("version_api", &PackageManifest::version_api)
        .def_readonly("error_handling_doc", &PackageManifest::error_handling_doc)
        .def_readonly("interop", &PackageManifest::interop)
        .def_readonly("attestations", &PackageManifest::attestations)
        .def("to_json", [](const PackageManifest& m) { return manifest_to_json(m).dump(2); })
        .def("__repr__", [](const PackageManifest& m) {
            return "PackageManifest('" + m.name + "', '" + m.version.str() + "')";
        });
    m.def("parse_manifest", &parse_manifest);
    m.def("validate_manifest", [](const PackageManifest& m) {
        std::vector<std::string> out;
        for (const auto& v : validate_manifest(m))
            out.push_back(v.str());
        return out;
    });

    // ------------------------------------------------------------------ registry
    py::class_<Registry>(m, "Registry")
        .def(py::init<>())
        .def_static(
            "ingest_directory",
            [](const std::filesystem::path& root) { return Registry::ingest_directory(root); },
            py::arg("root"))
        .def("add", &Registry::add)
        .def("lookup",
             [](const Registry& r, const std::string& name, const std::string& constraint) {
                 return r.lookup(name, parse_constraint(constraint));
             })
        .def("contains", &Registry::contains)
        .def("find", &Registry::find, py::return_value_policy::copy)
        .def("names", &Registry::names)
        .def("package_count", &Registry::package_count)
        .def("entry_count", &Registry::entry_count);

    // ------------------------------------------------------------------ resolver
    py::class_<Demand>(m, "Demand")
        .def_property_readonly("requirer", [](const Demand& d) { return d.from; })
        .def_readonly("constraint", &Demand::constraint)
        .def("__repr__", [](const Demand& d) {
            return "Demand('" + d.from + "', '" + d.constraint.str() + "')";
        });

    py::class_<ConflictExplanation>(m, "ConflictExplanation")
        .def_readonly("package", &ConflictExplanation::package)
        .def_readonly("demands", &ConflictExplanation::demands)
        .def_readonly("available", &ConflictExplanation::available);

    py::class_<Decision>(m, "Decision")
        .def_readonly("package", &Decision::package)
        .def_readonly("version", &Decision::version)
        .def_readonly("cause", &Decision::cause);

    py::class_<ResolutionResult>(m, "ResolutionResult")
        .def_property_readonly("outcome",
                               [](const ResolutionResult& r) {
                                   return r.solved() ? "solved" : "conflict";
                               })
        .def_property_readonly("solved", &ResolutionResult::solved)
        .def_readonly("assignment", &ResolutionResult::assignment)
        .def_readonly("decisions", &ResolutionResult::decisions)
        .def_readonly("conflict", &ResolutionResult::conflict)
        .def("lockfile_json", [](const ResolutionResult& r) {
            return lockfile_to_json(r).dump(2);
        });

    m.def(
        "resolve",
        [](const Registry& r, const std::vector<std::pair<std::string, std::string>>& roots) {
            return resolve(r, roots_from_pairs(roots));
        },
        py::arg("registry"), py::arg("roots"));
    m.def("build_order", &build_order);
    m.def("export_dependency_list", &export_dependency_list);
    m.def("explain_conflict", &explain_conflict);

    // -------------------------------------------------------------------- policy
    py::class_<PolicyCheckResult>(m, "PolicyCheckResult")
        .def_property_readonly("policy",
                               [](const PolicyCheckResult& r) {
                                   return std::string(policy_id_text(r.policy));
                               })
        .def_property_readonly("status",
                               [](const PolicyCheckResult& r) {
                                   return std::string(check_status_name(r.status));
                               })
        .def_property_readonly("severity",
                               [](const PolicyCheckResult& r) {
                                   return r.severity == PolicySeverity::mandatory
                                              ? "mandatory"
                                              : "recommended";
                               })
        .def_readonly("evidence", &PolicyCheckResult::evidence);

    py::class_<ComplianceReport>(m, "ComplianceReport")
        .def_readonly("package", &ComplianceReport::package)
        .def_readonly("version", &ComplianceReport::version)
        .def_readonly("results", &ComplianceReport::results)
        .def_readonly("xsdk_compatible", &ComplianceReport::xsdk_compatible)
        .def("render", [](const ComplianceReport& r, const std::string& format) {
            return render_report(r, format == "json" ? ReportFormat::json : ReportFormat::text);
        }, py::arg("format") = "text");

    m.def(
        "audit_package",
        [](const Registry& registry, const std::string& package,
           const std::filesystem::path& source_root,
           const std::optional<std::filesystem::path>& install_prefix, const std::string& mode,
           const std::optional<std::filesystem::path>& config_path) {
            AuditContext ctx;
            ctx.manifest = registry.versions_of(package).front();
            ctx.source_root = source_root;
            ctx.install_prefix = install_prefix;
            ctx.mode = mode == "execute" ? AuditMode::execute : AuditMode::static_only;
            ctx.registry = &registry;
            if (config_path)
                ctx.config = AuditConfig::load_file(*config_path);
            SystemExecutor executor;
            if (ctx.mode == AuditMode::execute)
                ctx.executor = &executor;
            return audit_package(ctx);
        },
        py::arg("registry"), py::arg("package"), py::arg("source_root"),
        py::arg("install_prefix") = std::nullopt, py::arg("mode") = "static",
        py::arg("config_path") = std::nullopt,
        py::call_guard<py::gil_scoped_release>());

    // ------------------------------------------------------------------- release
    py::class_<ReleaseSnapshot>(m, "ReleaseSnapshot")
        .def(py::init([](const Version& sdk, const std::map<std::string, Version>& components) {
                 return ReleaseSnapshot{sdk, components};
             }),
             py::arg("sdk_version"), py::arg("components"))
        .def_static("from_json",
                    [](const std::string& text) { return snapshot_from_json(json::parse(text)); })
        .def_readonly("sdk_version", &ReleaseSnapshot::sdk_version)
        .def_readonly("components", &ReleaseSnapshot::components)
        .def("to_json", [](const ReleaseSnapshot& s) { return snapshot_to_json(s).dump(2); });

    py::class_<ReleasePlan>(m, "ReleasePlan")
        .def_readonly("previous", &ReleasePlan::previous)
        .def_readonly("proposed_components", &ReleasePlan::proposed_components)
        .def_property_readonly("component_bumps",
                               [](const ReleasePlan& p) {
                                   std::map<std::string, std::string> out;
                                   for (const auto& [name, bump] : p.component_bumps)
                                       out[name] = bump_level_name(bump);
                                   return out;
                               })
        .def_readonly("additions", &ReleasePlan::additions)
        .def_readonly("removals", &ReleasePlan::removals)
        .def_property_readonly("required_level",
                               [](const ReleasePlan& p) {
                                   return std::string(bump_level_name(p.required_level));
                               })
        .def_readonly("proposed_sdk_version", &ReleasePlan::proposed_sdk_version)
        .def("to_json", [](const ReleasePlan& p) { return plan_to_json(p).dump(2); });

    m.def("classify_bump", [](const Version& old_v, const Version& new_v) {
        return std::string(bump_level_name(classify_bump(old_v, new_v)));
    });
    m.def("bump_version", [](const Version& v, const std::string& level) {
        return bump_version(v, bump_from_text(level));
    });
    m.def("plan_release", &plan_release, py::arg("previous"), py::arg("proposed"));
    m.def("validate_release", [](const ReleasePlan& plan, const std::string& target) {
        std::vector<std::string> out;
        for (const auto& v : validate_release(plan, bump_from_text(target)))
            out.push_back(v.str());
        return out;
    });

    // ------------------------------------------------------------------- interop
    py::class_<InteropMatrix>(m, "InteropMatrix")
        .def_readonly("packages", &InteropMatrix::packages)
        .def("level", &InteropMatrix::level)
        .def("cells",
             [](const InteropMatrix& m) {
                 std::map<std::pair<std::string, std::string>, int> out(m.cells.begin(),
                                                                        m.cells.end());
                 return out;
             })
        .def("render", [](const InteropMatrix& m, const std::string& format) {
            return render_matrix(m, format == "dot" ? MatrixFormat::dot : MatrixFormat::text);
        }, py::arg("format") = "text")
        .def("to_json", [](const InteropMatrix& m) { return matrix_to_json(m).dump(2); });

    m.def("build_interop_matrix", &build_interop_matrix);
    m.def("validate_interop", [](const PackageManifest& m, const Registry& r) {
        std::vector<std::string> out;
        for (const auto& v : validate_interop(m, r))
            out.push_back(v.str());
        return out;
    });

    // -------------------------------------------------------------- orchestrator
    py::class_<CommandResult>(m, "CommandResult")
        .def(py::init<int, std::string>(), py::arg("exit_code") = 0, py::arg("output") = "")
        .def_readwrite("exit_code", &CommandResult::exit_code)
        .def_readwrite("output", &CommandResult::output);

    py::class_<CommandExecutor, PyCommandExecutor>(m, "CommandExecutor")
        .def(py::init<>())
        .def("run", &CommandExecutor::run);

    py::class_<SystemExecutor, CommandExecutor>(m, "SystemExecutor").def(py::init<>());

    py::class_<RecordingExecutor::Record>(m, "ExecutionRecord")
        .def_readonly("package", &RecordingExecutor::Record::package)
        .def_readonly("command", &RecordingExecutor::Record::command)
        .def_readonly("workdir", &RecordingExecutor::Record::workdir)
        .def_readonly("sequence", &RecordingExecutor::Record::sequence);

    py::class_<RecordingExecutor, CommandExecutor>(m, "RecordingExecutor")
        .def(py::init<>())
        .def(py::init<std::function<int(const std::string&)>>(), py::arg("exit_code_for"))
        .def("records", &RecordingExecutor::records);

    py::class_<BuildConfig>(m, "BuildConfig")
        .def(py::init([](const std::filesystem::path& prefix, bool debug, bool shared_libs,
                         bool use_64bit, int parallelism) {
                 return BuildConfig{prefix, debug, shared_libs, use_64bit, parallelism};
             }),
             py::arg("prefix"), py::arg("debug") = false, py::arg("shared_libs") = false,
             py::arg("use_64bit") = false, py::arg("parallelism") = 1);

    py::class_<BuildStep>(m, "BuildStep")
        .def_readonly("package", &BuildStep::package)
        .def_readonly("version", &BuildStep::version)
        .def_readonly("prefix", &BuildStep::prefix)
        .def_readonly("configure_command", &BuildStep::configure_command)
        .def_readonly("build_command", &BuildStep::build_command)
        .def_readonly("install_command", &BuildStep::install_command)
        .def_readonly("dep_dirs", &BuildStep::dep_dirs)
        .def_readonly("depends_on", &BuildStep::depends_on);

    py::class_<BuildPlan>(m, "BuildPlan")
        .def_readonly("steps", &BuildPlan::steps)
        .def_readonly("parallelism", &BuildPlan::parallelism)
        .def("to_json", [](const BuildPlan& p) { return build_plan_to_json(p).dump(2); });

    py::class_<StepOutcome>(m, "StepOutcome")
        .def_property_readonly("status",
                               [](const StepOutcome& s) {
                                   return std::string(step_status_name(s.status));
                               })
        .def_readonly("log_path", &StepOutcome::log_path)
        .def_readonly("output", &StepOutcome::output);

    py::class_<BuildOutcome>(m, "BuildOutcome")
        .def_readonly("steps", &BuildOutcome::steps)
        .def("all_succeeded", &BuildOutcome::all_succeeded);

    m.def("generate_build_plan", &generate_build_plan, py::arg("resolution"), py::arg("registry"),
          py::arg("config"));
    m.def(
        "execute_plan",
        [](const BuildPlan& plan, CommandExecutor& executor,
           const std::optional<std::filesystem::path>& workdir) {
            return execute_plan(plan, executor, workdir);
        },
        py::arg("plan"), py::arg("executor"), py::arg("workdir") = std::nullopt,
        py::call_guard<py::gil_scoped_release>());
    m.def("verify_install", &verify_install);
    m.def("check_install_layout", &check_install_layout);

#ifdef ECOFORGE_VERSION
    m.attr("__version__") = ECOFORGE_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}
