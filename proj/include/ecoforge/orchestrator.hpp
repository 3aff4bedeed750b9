#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ecoforge/executor.hpp"
#include "ecoforge/resolver.hpp"

namespace ecoforge {

struct BuildConfig {
    std::filesystem::path prefix; // must be absolute
    bool debug = false;
    bool shared_libs = false;
    bool use_64bit = false;
    int parallelism = 1;
};

struct BuildStep {
    std::string package;
    Version version;
    std::string prefix; // this step's install prefix
    std::string configure_command;
    std::string build_command;
    std::string install_command;
    std::map<std::string, std::string> dep_dirs; // required dep -> its prefix
    std::vector<std::string> depends_on;         // required deps, scheduling order

    bool operator==(const BuildStep&) const = default;
};

struct BuildPlan {
    std::vector<BuildStep> steps; // in build order
    int parallelism = 1;

    bool operator==(const BuildPlan&) const = default;
};

enum class StepStatus { succeeded, failed, skipped };

const char* step_status_name(StepStatus s);

struct StepOutcome {
    StepStatus status = StepStatus::skipped;
    std::string log_path; // set when a workdir was given
    std::string output;   // captured combined output
};

struct BuildOutcome {
    std::map<std::string, StepOutcome> steps;

    bool all_succeeded() const;
};

/// Expands every build template with the canonical standard options and the
/// per-dependency install dirs. Canonical configure flags are appended
/// unless the template already wires the same datum through a placeholder:
///
///   autoconf: --prefix=, --enable-debug=, --enable-shared=,
///             --enable-64bit-indices=, --with-<dep>-dir=
///   cmake:    -DCMAKE_INSTALL_PREFIX=, -DCMAKE_BUILD_TYPE=,
///             -DBUILD_SHARED_LIBS=, -DXSDK_ENABLE_64BIT_INDICES=,
///             -DTPL_<DEP>_DIR=
///
/// Every dependency is satisfied from an outside install dir, never from a
/// vendored copy. Throws Error{invalid_input} on conflict results and
/// Error{template_error} on unknown or unbindable placeholders.
BuildPlan generate_build_plan(const ResolutionResult& res, const Registry& registry,
                              const BuildConfig& cfg);

json build_plan_to_json(const BuildPlan& plan);

/// Runs the plan through the executor. Independent steps run concurrently up
/// to the plan's parallelism; a step starts only after all its dependencies
/// succeeded, and steps downstream of a failure are skipped, not run. When a
/// workdir is given, per-step logs go to <workdir>/logs/<package>.log.
BuildOutcome execute_plan(const BuildPlan& plan, CommandExecutor& executor,
                          const std::optional<std::filesystem::path>& workdir = {});

/// Walks an install prefix against the layout rule: headers under include/,
/// libraries under lib/, bin/ and share/ free-form. Returns violation texts.
std::vector<std::string> check_install_layout(const std::filesystem::path& prefix);

/// Layout verification for one installed package; feeds the M13 audit check.
std::vector<std::string> verify_install(const std::filesystem::path& prefix,
                                        const PackageManifest& m);

} // namespace ecoforge
