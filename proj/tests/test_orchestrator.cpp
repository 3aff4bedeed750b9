#include <doctest.h>

#include <fstream>
#include <random>

#include "ecoforge/orchestrator.hpp"
#include "support.hpp"

using namespace ecoforge;
using namespace testsupport;

namespace {

BuildConfig default_config() {
    BuildConfig cfg;
    cfg.prefix = "/opt/xsdk";
    return cfg;
}

ResolutionResult resolve_all(const Registry& r) {
    std::vector<RootSpec> roots;
    for (const auto& name : r.names())
        roots.push_back({name, VersionConstraint::any()});
    return resolve(r, roots);
}

} // namespace

TEST_CASE("configure lines carry the canonical flags and dependency dirs") {
    Registry r;
    r.add(make_manifest("superlu", "5.2.1"));
    r.add(make_manifest("petsc", "3.7.0", {dep("superlu", ">=5.0.0")}));

    BuildConfig cfg = default_config();
    cfg.debug = true;
    const BuildPlan plan = generate_build_plan(resolve_all(r), r, cfg);

    REQUIRE(plan.steps.size() == 2);
    CHECK(plan.steps[0].package == "superlu");
    const BuildStep& petsc = plan.steps[1];
    CHECK(petsc.configure_command.find("--prefix=/opt/xsdk/petsc-3.7.0") != std::string::npos);
    CHECK(petsc.configure_command.find("--enable-debug=yes") != std::string::npos);
    CHECK(petsc.configure_command.find("--with-superlu-dir=/opt/xsdk/superlu-5.2.1") !=
          std::string::npos);
    CHECK(petsc.dep_dirs.at("superlu") == "/opt/xsdk/superlu-5.2.1");
}

TEST_CASE("a leaf package with defaults gets exactly the four global flags") {
    Registry r;
    r.add(make_manifest("leaf", "1.0.0"));
    const BuildPlan plan = generate_build_plan(resolve_all(r), r, default_config());
    REQUIRE(plan.steps.size() == 1);
    CHECK(plan.steps[0].configure_command ==
          "./configure --prefix=/opt/xsdk/leaf-1.0.0 --enable-debug=no --enable-shared=no "
          "--enable-64bit-indices=no");
}

TEST_CASE("cmake packages get the cmake spellings") {
    Registry r;
    PackageManifest m = make_manifest("kit", "2.0.0");
    m.build.system = "cmake";
    m.build.configure_command = "cmake -S . -B build";
    r.add(m);

    BuildConfig cfg = default_config();
    cfg.shared_libs = true;
    cfg.use_64bit = true;
    const BuildPlan plan = generate_build_plan(resolve_all(r), r, cfg);
    const std::string& line = plan.steps[0].configure_command;
    CHECK(line.find("-DCMAKE_INSTALL_PREFIX=/opt/xsdk/kit-2.0.0") != std::string::npos);
    CHECK(line.find("-DCMAKE_BUILD_TYPE=Release") != std::string::npos);
    CHECK(line.find("-DBUILD_SHARED_LIBS=ON") != std::string::npos);
    CHECK(line.find("-DXSDK_ENABLE_64BIT_INDICES=ON") != std::string::npos);
}

TEST_CASE("unknown dep_dir placeholders are template errors") {
    Registry r;
    PackageManifest m = make_manifest("broken", "1.0.0");
    m.build.configure_command = "./configure --prefix={prefix} --with-ghost={dep_dir:ghost}";
    r.add(m);
    try {
        generate_build_plan(resolve_all(r), r, default_config());
        FAIL("expected template-error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::template_error);
        CHECK(std::string(e.what()).find("ghost") != std::string::npos);
    }
}

TEST_CASE("plan generation validates config and outcome") {
    Registry r;
    r.add(make_manifest("leaf", "1.0.0"));
    const ResolutionResult res = resolve_all(r);

    BuildConfig relative = default_config();
    relative.prefix = "relative/path";
    CHECK_THROWS_AS(generate_build_plan(res, r, relative), Error);

    BuildConfig no_jobs = default_config();
    no_jobs.parallelism = 0;
    CHECK_THROWS_AS(generate_build_plan(res, r, no_jobs), Error);
}

TEST_CASE("dry-run execution records the plan's commands in topological order") {
    Registry r;
    r.add(make_manifest("superlu", "5.2.1"));
    r.add(make_manifest("hypre", "2.11.2"));
    r.add(make_manifest("petsc", "3.7.0", {dep("superlu", "*"), dep("hypre", "*")}));

    const BuildPlan plan = generate_build_plan(resolve_all(r), r, default_config());
    RecordingExecutor executor;
    const BuildOutcome outcome = execute_plan(plan, executor);
    CHECK(outcome.all_succeeded());

    std::vector<std::string> expected;
    for (const auto& step : plan.steps) {
        expected.push_back(step.configure_command);
        expected.push_back(step.build_command);
        expected.push_back(step.install_command);
    }
    std::vector<std::string> recorded;
    for (const auto& rec : executor.records())
        recorded.push_back(rec.command);
    CHECK(recorded == expected);
}

TEST_CASE("a failed dependency skips dependents but not independent steps") {
    Registry r;
    r.add(make_manifest("superlu", "5.2.1"));
    r.add(make_manifest("hypre", "2.11.2"));
    r.add(make_manifest("petsc", "3.7.0", {dep("superlu", "*")}));

    const BuildPlan plan = generate_build_plan(resolve_all(r), r, default_config());
    RecordingExecutor executor([](const std::string& package) {
        return package == "superlu" ? 1 : 0;
    });
    const BuildOutcome outcome = execute_plan(plan, executor);

    CHECK(outcome.steps.at("superlu").status == StepStatus::failed);
    CHECK(outcome.steps.at("petsc").status == StepStatus::skipped);
    CHECK(outcome.steps.at("hypre").status == StepStatus::succeeded);
    CHECK_FALSE(outcome.all_succeeded());

    // The skipped step never reached the executor.
    for (const auto& rec : executor.records())
        CHECK(rec.package != "petsc");
}

TEST_CASE("an empty plan runs to an empty outcome") {
    RecordingExecutor executor;
    const BuildOutcome outcome = execute_plan(BuildPlan{}, executor);
    CHECK(outcome.steps.empty());
    CHECK(outcome.all_succeeded());
}

TEST_CASE("plans are byte-identical across repeated generation") {
    const Registry r = Registry::ingest_directory(fixture_dir() / "registry_full");
    BuildConfig cfg = default_config();
    cfg.parallelism = 3;
    const std::string once = build_plan_to_json(generate_build_plan(resolve_all(r), r, cfg)).dump(2);
    const std::string twice =
        build_plan_to_json(generate_build_plan(resolve_all(r), r, cfg)).dump(2);
    CHECK(once == twice);
}

TEST_CASE("concurrent schedules respect dependency order at every parallelism level") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const RandomInstance instance = random_dag_instance(rng, 8);
        const ResolutionResult res = resolve(instance.registry, instance.roots);
        REQUIRE(res.solved());

        for (int jobs = 1; jobs <= 4; ++jobs) {
            BuildConfig cfg = default_config();
            cfg.parallelism = jobs;
            const BuildPlan plan = generate_build_plan(res, instance.registry, cfg);
            RecordingExecutor executor;
            const BuildOutcome outcome = execute_plan(plan, executor);
            CHECK(outcome.all_succeeded());

            std::map<std::string, unsigned long> first_seq, last_seq;
            for (const auto& rec : executor.records()) {
                if (!first_seq.count(rec.package))
                    first_seq[rec.package] = rec.sequence;
                last_seq[rec.package] = rec.sequence;
            }
            for (const auto& step : plan.steps) {
                for (const auto& dependency : step.depends_on) {
                    CAPTURE(step.package);
                    CAPTURE(dependency);
                    CHECK(first_seq.at(step.package) > last_seq.at(dependency));
                }
            }
        }
    }
}

TEST_CASE("execute_plan writes per-step logs under the workdir") {
    Registry r;
    r.add(make_manifest("leaf", "1.0.0"));
    const BuildPlan plan = generate_build_plan(resolve_all(r), r, default_config());

    TempDir workdir;
    RecordingExecutor executor;
    const BuildOutcome outcome = execute_plan(plan, executor, workdir.path());
    const auto& step = outcome.steps.at("leaf");
    CHECK(step.log_path == (workdir.path() / "logs" / "leaf.log").string());
    CHECK(fs::exists(step.log_path));
}

TEST_CASE("execute_plan creates a missing workdir before running commands") {
    Registry r;
    PackageManifest m = make_manifest("leaf", "1.0.0");
    m.build.configure_command = "echo configuring {prefix}";
    m.build.build_command = "true";
    m.build.install_command = "true";
    r.add(m);
    const BuildPlan plan = generate_build_plan(resolve_all(r), r, default_config());

    TempDir scratch;
    const fs::path workdir = scratch.path() / "not" / "yet" / "there";
    SystemExecutor executor; // real shell: the cd into workdir must succeed
    const BuildOutcome outcome = execute_plan(plan, executor, workdir);
    CHECK(outcome.all_succeeded());
    CHECK(fs::exists(workdir / "logs" / "leaf.log"));
}

TEST_CASE("install layout verification") {
    TempDir prefix;
    fs::create_directories(prefix.path() / "include");
    fs::create_directories(prefix.path() / "lib");
    fs::create_directories(prefix.path() / "share/doc");
    fs::create_directories(prefix.path() / "bin");
    std::ofstream(prefix.path() / "include/foo.h") << "#pragma once\n";
    std::ofstream(prefix.path() / "lib/libfoo.a") << "ar\n";
    std::ofstream(prefix.path() / "share/doc/readme") << "docs\n";
    std::ofstream(prefix.path() / "bin/foo-config") << "#!/bin/sh\n";

    const PackageManifest m = make_manifest("foo", "1.0.0");
    CHECK(verify_install(prefix.path(), m).empty());

    fs::create_directories(prefix.path() / "lib64");
    std::ofstream(prefix.path() / "lib64/libx.a") << "ar\n";
    auto violations = verify_install(prefix.path(), m);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0] == "library outside lib/: lib64/libx.a");

    std::ofstream(prefix.path() / "stray.h") << "#pragma once\n";
    violations = verify_install(prefix.path(), m);
    REQUIRE(violations.size() == 2);
    CHECK(violations[1] == "header outside include/: stray.h"); // walk order is sorted

    CHECK_THROWS_AS(verify_install(prefix.path() / "missing", m), Error);
}
