#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ecoforge/registry.hpp"

namespace ecoforge {

struct RootSpec {
    std::string name;
    VersionConstraint constraint;

    bool operator==(const RootSpec&) const = default;
};

struct Demand {
    std::string from; // requiring package, or "(root)"
    VersionConstraint constraint;

    bool operator==(const Demand&) const = default;
};

/// Certificate that no stored version of `package` satisfies all demands
/// simultaneously (checkable by brute force over `available`).
struct ConflictExplanation {
    std::string package;
    std::vector<Demand> demands;    // deduplicated, sorted by demander name
    std::vector<Version> available; // stored versions, newest first
};

struct Decision {
    std::string package;
    Version version;
    std::string cause;

    bool operator==(const Decision&) const = default;
};

/// One dependency edge induced by a solved assignment.
struct ResolvedEdge {
    std::string from;
    std::string to;
    VersionConstraint constraint;
    bool required = true;

    bool operator==(const ResolvedEdge&) const = default;
};

enum class ResolutionOutcome { solved, conflict };

struct ResolutionResult {
    ResolutionOutcome outcome = ResolutionOutcome::conflict;
    std::vector<RootSpec> roots;
    std::map<std::string, Version> assignment; // populated when solved
    std::vector<ResolvedEdge> edges;           // induced graph when solved
    std::vector<Decision> decisions;
    std::optional<ConflictExplanation> conflict;

    bool solved() const { return outcome == ResolutionOutcome::solved; }
};

/// Computes a single-version-per-package assignment covering all roots and
/// the transitive required closure, or a conflict explanation.
///
/// Depth-first backtracking: newest-first candidate order, roots processed
/// in the given order, dependencies in manifest order, chronological
/// backtracking. Optional dependencies never force a package in; they only
/// constrain its version when it is present. Deterministic for identical
/// inputs.
///
/// Throws Error{unknown_package} when a demanded name is absent from the
/// registry and Error{cycle_error} on a required-dependency cycle. A
/// conflict is a normal outcome, not an error.
ResolutionResult resolve(const Registry& registry, const std::vector<RootSpec>& roots);

/// Topological order on required edges (dependencies before dependents),
/// ties broken by ascending package name. Throws Error{invalid_input} on a
/// conflict result.
std::vector<std::pair<std::string, Version>> build_order(const ResolutionResult& res);

/// The transitive required-dependency closure of root, in build order,
/// excluding root itself. Throws Error{unknown_package} when root is not
/// assigned.
std::vector<std::pair<std::string, Version>> export_dependency_list(const ResolutionResult& res,
                                                                    const std::string& root);

/// Stable human-readable rendering of a conflict.
std::string explain_conflict(const ConflictExplanation& c);

/// Lockfile document (xsdk.lock.json): roots, assignment, build order.
/// Byte-stable for identical inputs (keys sorted).
json lockfile_to_json(const ResolutionResult& res);

/// Rebuilds a solved resolution from a lockfile document, recomputing the
/// dependency edges from the registry and re-checking every constraint.
ResolutionResult resolution_from_lockfile(const json& doc, const Registry& registry);

} // namespace ecoforge
