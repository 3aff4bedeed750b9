// Acceptance suite: runs each criterion against the fixture corpus and the
// randomized properties, printing one pass/fail line per criterion.

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "ecoforge/interop.hpp"
#include "ecoforge/orchestrator.hpp"
#include "ecoforge/policy.hpp"
#include "ecoforge/release.hpp"

#include "../audit_mutations.hpp"
#include "../support.hpp"

using namespace ecoforge;
using namespace testsupport;

namespace {

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void expect(bool condition, const std::string& message) {
        if (!condition) {
            ok = false;
            detail << "    " << message << "\n";
        }
    }
};

std::vector<RootSpec> all_roots(const Registry& r) {
    std::vector<RootSpec> roots;
    for (const auto& name : r.names())
        roots.push_back({name, VersionConstraint::any()});
    return roots;
}

// Criterion 1: the six-package fixture reproduces the schematic interop
// matrix exactly.
void criterion_interop_matrix(Check& check) {
    const Registry r = Registry::ingest_directory(fixture_dir() / "registry_full");
    const ResolutionResult res = resolve(r, all_roots(r));
    check.expect(res.solved(), "six-package fixture must resolve");
    if (!res.solved())
        return;
    const InteropMatrix matrix = build_interop_matrix(r, res);

    const std::set<std::pair<std::string, std::string>> level3 = {
        {"petsc", "hypre"}, {"petsc", "superlu"}, {"trilinos", "hypre"}, {"trilinos", "superlu"}};
    const std::set<std::pair<std::string, std::string>> level2 = {{"trilinos", "petsc"}};

    check.expect(matrix.packages.size() == 6, "matrix covers six packages");
    for (const auto& from : matrix.packages) {
        for (const auto& to : matrix.packages) {
            if (from == to)
                continue;
            int expected = 1;
            if (level3.count({from, to}))
                expected = 3;
            else if (level2.count({from, to}))
                expected = 2;
            check.expect(matrix.level(from, to) == expected,
                         "cell (" + from + ", " + to + ") expected L" +
                             std::to_string(expected) + ", got L" +
                             std::to_string(matrix.level(from, to)));
        }
    }
}

// Criterion 2: release arithmetic reproduces 0.1.0 -> 0.1.1 and rejects a
// minor component bump at target patch.
void criterion_release_arithmetic(Check& check) {
    const auto load = [](const std::string& name) {
        std::ifstream in(fixture_dir() / "release" / name);
        return snapshot_from_json(json::parse(in));
    };
    const ReleaseSnapshot prev = load("rel-0.1.0.json");

    const ReleasePlan patch_plan = plan_release(prev, load("rel-patch.json").components);
    check.expect(patch_plan.required_level == BumpLevel::patch, "patch-only plan demands patch");
    check.expect(patch_plan.proposed_sdk_version == parse_version("0.1.1"),
                 "sdk bumps 0.1.0 -> 0.1.1");
    check.expect(validate_release(patch_plan, BumpLevel::patch).empty(),
                 "patch plan validates at target patch");

    const ReleasePlan minor_plan = plan_release(prev, load("rel-minor.json").components);
    const auto violations = validate_release(minor_plan, BumpLevel::patch);
    check.expect(violations.size() == 1 &&
                     violations[0].str() == "component hypre: minor bump exceeds patch release",
                 "minor component bump is rejected at target patch");
}

// Criterion 3: resolver agreement with exhaustive enumeration on >= 200
// random registries, plus independent re-checks of both outcomes.
void criterion_resolver_oracle(Check& check) {
    std::mt19937 rng(424242);
    int solved = 0, conflicts = 0;
    for (int trial = 0; trial < 220; ++trial) {
        const RandomInstance instance = random_instance(rng, 5, 4);
        ResolutionResult res;
        try {
            res = resolve(instance.registry, instance.roots);
        } catch (const Error& e) {
            check.expect(false, "trial " + std::to_string(trial) + " raised: " + e.what());
            continue;
        }
        const bool oracle = oracle_solvable(instance.registry, instance.roots);
        check.expect(res.solved() == oracle,
                     "trial " + std::to_string(trial) + ": solver " +
                         (res.solved() ? "solved" : "conflicted") + " but oracle says " +
                         (oracle ? "solvable" : "unsolvable"));
        if (res.solved()) {
            ++solved;
            check.expect(recheck_solution(instance.registry, instance.roots, res),
                         "trial " + std::to_string(trial) + ": edge re-check failed");
        } else {
            ++conflicts;
            check.expect(explanation_unsatisfiable(instance.registry, *res.conflict),
                         "trial " + std::to_string(trial) +
                             ": conflict explanation not brute-force unsatisfiable");
        }
    }
    check.expect(solved > 20 && conflicts > 20,
                 "generator must exercise both outcomes (solved=" + std::to_string(solved) +
                     ", conflicts=" + std::to_string(conflicts) + ")");
}

// Criterion 4: the SuperLU regression fixture conflicts, then flips to
// solved when the compatible trilinos appears.
void criterion_superlu_regression(Check& check) {
    const Registry broken = Registry::ingest_directory(fixture_dir() / "registry_conflict");
    const ResolutionResult conflict =
        resolve(broken, {{"petsc", VersionConstraint::any()}, {"trilinos", VersionConstraint::any()}});
    check.expect(!conflict.solved(), "fixture must conflict");
    if (conflict.conflict) {
        const ConflictExplanation& c = *conflict.conflict;
        check.expect(c.package == "superlu", "conflict centers on superlu");
        check.expect(c.demands.size() == 2, "two demands");
        if (c.demands.size() == 2) {
            check.expect(c.demands[0].from == "petsc" &&
                             c.demands[0].constraint == parse_constraint(">=5.0.0"),
                         "petsc demands >=5.0.0");
            check.expect(c.demands[1].from == "trilinos" &&
                             c.demands[1].constraint == parse_constraint("=4.3.0"),
                         "trilinos demands =4.3.0");
        }
        check.expect(explanation_unsatisfiable(broken, c), "explanation is unsatisfiable");
    }

    const Registry fixed = Registry::ingest_directory(fixture_dir() / "registry_conflict_fixed");
    const ResolutionResult ok =
        resolve(fixed, {{"petsc", VersionConstraint::any()}, {"trilinos", VersionConstraint::any()}});
    check.expect(ok.solved(), "fixed fixture must resolve");
    if (ok.solved()) {
        check.expect(ok.assignment.at("petsc") == parse_version("3.7.0"), "petsc 3.7.0");
        check.expect(ok.assignment.at("trilinos") == parse_version("12.8.0"), "trilinos 12.8.0");
        check.expect(ok.assignment.at("superlu") == parse_version("5.2.1"),
                     "newest satisfying superlu 5.2.1");
    }
}

// Criterion 5: 19 single-fault mutations each fail exactly their target
// policy; mandatory mutations break compatibility, recommended ones do not.
void criterion_policy_matrix(Check& check) {
    const ComplianceReport base = audit_package(goodpkg_fixture().context());
    for (const auto& r : base.results)
        check.expect(r.status != CheckStatus::failed,
                     std::string("baseline must pass ") + policy_id_text(r.policy));
    check.expect(base.xsdk_compatible, "baseline is xsdk compatible");

    for (PolicyId target : all_policy_ids) {
        const AuditFixture f = mutated_fixture(target);
        const ComplianceReport report = audit_package(f.context());
        for (const auto& r : report.results) {
            const bool should_fail = r.policy == target;
            check.expect((r.status == CheckStatus::failed) == should_fail,
                         std::string("mutation ") + policy_id_text(target) + ": policy " +
                             policy_id_text(r.policy) + " status " +
                             check_status_name(r.status));
        }
        const bool mandatory = policy_severity(target) == PolicySeverity::mandatory;
        check.expect(report.xsdk_compatible == !mandatory,
                     std::string("mutation ") + policy_id_text(target) +
                         ": xsdk_compatible must be " + (mandatory ? "false" : "true"));
    }
}

// Criterion 6: on random DAGs every recorded schedule respects dependency
// order at parallelism 1-4, and plans are byte-identical across runs.
void criterion_orchestrator_safety(Check& check) {
    std::mt19937 rng(9090);
    for (int trial = 0; trial < 25; ++trial) {
        const RandomInstance instance = random_dag_instance(rng, 8);
        const ResolutionResult res = resolve(instance.registry, instance.roots);
        if (!res.solved()) {
            check.expect(false, "single-version DAG instances always resolve");
            continue;
        }
        for (int jobs = 1; jobs <= 4; ++jobs) {
            BuildConfig cfg;
            cfg.prefix = "/opt/xsdk";
            cfg.parallelism = jobs;
            const BuildPlan plan = generate_build_plan(res, instance.registry, cfg);
            const BuildPlan again = generate_build_plan(res, instance.registry, cfg);
            check.expect(build_plan_to_json(plan).dump() == build_plan_to_json(again).dump(),
                         "plan bytes differ across runs");

            RecordingExecutor executor;
            const BuildOutcome outcome = execute_plan(plan, executor);
            check.expect(outcome.all_succeeded(), "all steps succeed under the dry executor");

            std::map<std::string, unsigned long> first_seq, last_seq;
            for (const auto& rec : executor.records()) {
                if (!first_seq.count(rec.package))
                    first_seq[rec.package] = rec.sequence;
                last_seq[rec.package] = rec.sequence;
            }
            for (const auto& step : plan.steps) {
                for (const auto& dependency : step.depends_on) {
                    check.expect(first_seq.at(step.package) > last_seq.at(dependency),
                                 "step " + step.package + " started before its dependency " +
                                     dependency + " finished (jobs=" + std::to_string(jobs) +
                                     ")");
                }
            }
        }
    }
}

// Criterion 7: manifest, lockfile, report, and snapshot documents all
// round-trip to structural equality across the fixture corpus.
void criterion_round_trips(Check& check) {
    int manifests = 0;
    for (const auto& entry : fs::recursive_directory_iterator(fixture_dir())) {
        if (!entry.is_regular_file() || entry.path().filename() != "package.xsdk.json")
            continue;
        ++manifests;
        std::ifstream in(entry.path());
        std::ostringstream buf;
        buf << in.rdbuf();
        PackageManifest m;
        try {
            m = parse_manifest(buf.str());
        } catch (const Error& e) {
            check.expect(false, entry.path().string() + ": " + e.what());
            continue;
        }
        const PackageManifest reparsed = parse_manifest(manifest_to_json(m).dump());
        check.expect(reparsed == m, "manifest round-trip failed: " + entry.path().string());
    }
    check.expect(manifests >= 20, "fixture corpus holds the expected manifests");

    const Registry r = Registry::ingest_directory(fixture_dir() / "registry_full");
    const ResolutionResult res = resolve(r, all_roots(r));
    const json lock = lockfile_to_json(res);
    const ResolutionResult reloaded = resolution_from_lockfile(lock, r);
    check.expect(lockfile_to_json(reloaded).dump(2) == lock.dump(2), "lockfile round-trip");

    const ComplianceReport report = audit_package(goodpkg_fixture().context());
    const ComplianceReport reparsed = report_from_json(report_to_json(report));
    check.expect(reparsed == report, "compliance report round-trip");

    for (const char* name : {"rel-0.1.0.json", "rel-patch.json", "rel-minor.json"}) {
        std::ifstream in(fixture_dir() / "release" / name);
        const ReleaseSnapshot snapshot = snapshot_from_json(json::parse(in));
        check.expect(snapshot_from_json(snapshot_to_json(snapshot)) == snapshot,
                     std::string("snapshot round-trip: ") + name);
    }

    const InteropMatrix matrix = build_interop_matrix(r, res);
    check.expect(matrix_from_json(matrix_to_json(matrix)) == matrix, "matrix round-trip");
}

struct Criterion {
    int id;
    std::string summary;
    double budget_seconds;
    std::function<void(Check&)> run;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "interop matrix matches the schematic", 1.0, criterion_interop_matrix},
        {2, "coordinated release arithmetic", 1.0, criterion_release_arithmetic},
        {3, "resolver agrees with exhaustive enumeration", 60.0, criterion_resolver_oracle},
        {4, "SuperLU conflict regression", 1.0, criterion_superlu_regression},
        {5, "policy single-fault matrix", 10.0, criterion_policy_matrix},
        {6, "orchestrator schedule safety", 10.0, criterion_orchestrator_safety},
        {7, "document round-trips", 5.0, criterion_round_trips},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        Check check;
        const auto start = std::chrono::steady_clock::now();
        try {
            criterion.run(check);
        } catch (const std::exception& e) {
            check.expect(false, std::string("unexpected exception: ") + e.what());
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        check.expect(elapsed < criterion.budget_seconds,
                     "exceeded budget: " + std::to_string(elapsed) + "s of " +
                         std::to_string(criterion.budget_seconds) + "s");

        std::cout << "criterion " << criterion.id << " ["
                  << (check.ok ? "PASS" : "FAIL") << "] " << criterion.summary << " ("
                  << static_cast<int>(elapsed * 1000) << " ms)\n";
        if (!check.ok) {
            std::cout << check.detail.str();
            ++failures;
        }
    }
    if (failures)
        std::cout << failures << " criterion(s) failed\n";
    else
        std::cout << "all 7 acceptance criteria passed\n";
    return failures == 0 ? 0 : 1;
}
