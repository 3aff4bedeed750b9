#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ecoforge/constraint.hpp"
#include "ecoforge/errors.hpp"
#include "ecoforge/version.hpp"

namespace ecoforge {

using json = nlohmann::json;

/// Package identifiers are lowercase alphanumeric plus hyphens and start
/// with a letter.
bool is_package_identifier(std::string_view name);

enum class DependencyKind { required, optional };

struct Dependency {
    std::string name;
    VersionConstraint constraint;
    DependencyKind kind = DependencyKind::required;

    bool operator==(const Dependency&) const = default;
};

/// Pairwise interoperability declaration. The level and the direction are
/// two spellings of the same fact and must agree:
/// 1 = side_by_side, 2 = accepts_data_from, 3 = calls.
struct InteropDeclaration {
    std::string peer;
    int level = 1;
    std::string direction; // side_by_side | accepts_data_from | calls
    std::string mechanism;

    bool operator==(const InteropDeclaration&) const = default;
};

struct BuildSpec {
    std::string system; // autoconf | cmake | script
    std::string configure_command;
    std::string build_command;
    std::string install_command;
    bool supports_64bit = false;
    bool supports_shared = false;

    bool operator==(const BuildSpec&) const = default;
};

struct PackageManifest {
    std::string name;
    Version version;
    std::string license; // SPDX identifier
    std::string contact;
    std::string repo_url;
    bool repo_public = false;
    std::vector<Dependency> dependencies;
    BuildSpec build;
    std::vector<std::string> namespace_prefixes;
    std::string test_command;
    std::string version_api;
    std::string error_handling_doc;
    std::vector<InteropDeclaration> interop;
    std::map<std::string, std::string> attestations; // policy id -> statement

    bool operator==(const PackageManifest&) const = default;

    const Dependency* find_dependency(std::string_view name) const;
    bool has_attestation(const std::string& policy_id) const;
};

/// Parses a package.xsdk.json document. Unknown keys are rejected. Throws
/// Error{parse_error} for malformed JSON, Error{schema_error} for missing or
/// mistyped keys, and Error{invariant_error} when the parsed manifest fails
/// validate_manifest.
PackageManifest parse_manifest(const std::string& document);

/// Checks the type invariants of an already constructed manifest. Returns an
/// empty list iff all invariants hold; each violation names the field and the
/// broken rule.
std::vector<Violation> validate_manifest(const PackageManifest& m);

/// Renders the manifest back to its document form (constraints appear
/// desugared). parse_manifest(manifest_to_json(m).dump()) == m.
json manifest_to_json(const PackageManifest& m);

} // namespace ecoforge
