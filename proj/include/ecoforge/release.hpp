#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ecoforge/errors.hpp"
#include "ecoforge/manifest.hpp"
#include "ecoforge/version.hpp"

namespace ecoforge {

/// Totally ordered: none < patch < minor < major.
enum class BumpLevel { none, patch, minor, major };

const char* bump_level_name(BumpLevel level);
std::optional<BumpLevel> parse_bump_level(std::string_view text);

/// Classifies the change between two component versions. Equal versions are
/// none; a move from prerelease to release of the same triple is a patch.
/// Throws Error{version_regression} when the new version orders below the
/// old one.
BumpLevel classify_bump(const Version& old_version, const Version& new_version);

/// Canonical increment: bumps one component, zeroes the lower ones, drops
/// any prerelease tag.
Version bump_version(const Version& v, BumpLevel level);

struct ReleaseSnapshot {
    Version sdk_version;
    std::map<std::string, Version> components; // non-empty

    bool operator==(const ReleaseSnapshot&) const = default;
};

json snapshot_to_json(const ReleaseSnapshot& s);
ReleaseSnapshot snapshot_from_json(const json& doc);

struct ReleasePlan {
    ReleaseSnapshot previous;
    std::map<std::string, Version> proposed_components;
    std::map<std::string, BumpLevel> component_bumps; // components present in both
    std::set<std::string> additions;
    std::set<std::string> removals;
    BumpLevel required_level = BumpLevel::patch;
    Version proposed_sdk_version;

    bool operator==(const ReleasePlan&) const = default;
};

/// Computes the ecosystem release plan under the coordinated-release rules:
/// unchanged or patch-bumped components demand a patch release, minor bumps
/// demand minor, major bumps demand major; additions demand minor and
/// removals demand major. Throws Error{version_regression} on any component
/// downgrade and Error{empty_plan} when nothing changed.
ReleasePlan plan_release(const ReleaseSnapshot& prev,
                         const std::map<std::string, Version>& proposed);

/// Empty iff target >= plan.required_level; each violation names the
/// offending component, addition, or removal and the rule it breaks.
std::vector<Violation> validate_release(const ReleasePlan& plan, BumpLevel target);

json plan_to_json(const ReleasePlan& plan);
ReleasePlan plan_from_json(const json& doc);

} // namespace ecoforge
