#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ecoforge/manifest.hpp"

namespace ecoforge {

/// In-memory index of all known (package, version) manifests, rebuilt from
/// disk on each invocation. Immutable after ingestion; concurrent readers
/// are safe.
class Registry {
public:
    Registry() = default;

    /// Parses every package.xsdk.json under root (recursive). Ingestion is
    /// fail-slow: all files are parsed and all defects reported together in
    /// one error. Layout mismatches between directory components and
    /// manifest content are warnings, appended to *warnings when given;
    /// the manifest is authoritative.
    static Registry ingest_directory(const std::filesystem::path& root,
                                     std::vector<std::string>* warnings = nullptr);

    /// Inserts one manifest, preserving the descending version sort.
    /// Throws Error{duplicate_entry} when (name, version) is already stored
    /// and Error{invariant_error} when the manifest fails validation.
    void add(PackageManifest m);

    /// Exactly the stored versions of name satisfying c, newest first.
    /// Throws Error{unknown_package} when name is absent entirely.
    std::vector<Version> lookup(const std::string& name, const VersionConstraint& c) const;

    bool contains(const std::string& name) const { return entries_.count(name) != 0; }

    /// Stored manifests of one package, newest first.
    const std::vector<PackageManifest>& versions_of(const std::string& name) const;

    const PackageManifest& find(const std::string& name, const Version& version) const;
    const PackageManifest* try_find(const std::string& name, const Version& version) const;

    std::vector<std::string> names() const;
    std::size_t package_count() const { return entries_.size(); }
    std::size_t entry_count() const;

private:
    std::map<std::string, std::vector<PackageManifest>> entries_;
};

} // namespace ecoforge
