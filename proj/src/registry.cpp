#include "ecoforge/registry.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace ecoforge {

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::io_error, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

Registry Registry::ingest_directory(const fs::path& root, std::vector<std::string>* warnings) {
    std::error_code ec;
    if (!fs::exists(root, ec) || !fs::is_directory(root, ec))
        throw Error(ErrorKind::io_error, "registry root is not a readable directory: " +
                                             root.string());

    // Deterministic ingest order regardless of directory iteration order.
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (entry.is_regular_file() && entry.path().filename() == "package.xsdk.json")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    Registry registry;
    std::map<std::pair<std::string, std::string>, fs::path> seen;
    std::vector<std::string> defects;
    bool duplicates = false;

    for (const auto& file : files) {
        PackageManifest m;
        try {
            m = parse_manifest(read_file(file));
        } catch (const Error& e) {
            defects.push_back(file.string() + ": " + e.what());
            continue;
        }

        const auto key = std::make_pair(m.name, m.version.str());
        if (auto it = seen.find(key); it != seen.end()) {
            defects.push_back("duplicate entry (" + m.name + ", " + m.version.str() + ") in " +
                              it->second.string() + " and " + file.string());
            duplicates = true;
            continue;
        }
        seen.emplace(key, file);

        // Expected layout: <root>/<name>/<version>/package.xsdk.json.
        if (warnings) {
            const fs::path dir = file.parent_path();
            const std::string version_dir = dir.filename().string();
            const std::string name_dir = dir.parent_path().filename().string();
            if (name_dir != m.name || version_dir != m.version.str())
                warnings->push_back("layout mismatch for " + file.string() + ": directory says (" +
                                    name_dir + ", " + version_dir + "), manifest says (" + m.name +
                                    ", " + m.version.str() + "); using the manifest");
        }

        registry.add(std::move(m));
    }

    if (!defects.empty()) {
        std::string msg = "ingest found " + std::to_string(defects.size()) + " defect(s):";
        for (const auto& d : defects)
            msg += "\n  " + d;
        throw Error(duplicates ? ErrorKind::duplicate_entry : ErrorKind::parse_error, msg);
    }
    return registry;
}

void Registry::add(PackageManifest m) {
    const auto violations = validate_manifest(m);
    if (!violations.empty()) {
        std::string msg = "manifest (" + m.name + ", " + m.version.str() + ") fails validation:";
        for (const auto& v : violations)
            msg += "\n  " + v.str();
        throw Error(ErrorKind::invariant_error, msg);
    }

    auto& list = entries_[m.name];
    const auto pos = std::lower_bound(
        list.begin(), list.end(), m,
        [](const PackageManifest& a, const PackageManifest& b) { return a.version > b.version; });
    if (pos != list.end() && pos->version == m.version)
        throw Error(ErrorKind::duplicate_entry,
                    "registry already holds (" + m.name + ", " + m.version.str() + ")");
    list.insert(pos, std::move(m));
}

std::vector<Version> Registry::lookup(const std::string& name,
                                      const VersionConstraint& c) const {
    std::vector<Version> out;
    for (const auto& m : versions_of(name)) {
        if (c.satisfied_by(m.version))
            out.push_back(m.version);
    }
    return out;
}

const std::vector<PackageManifest>& Registry::versions_of(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end())
        throw Error(ErrorKind::unknown_package, "unknown package \"" + name + "\"");
    return it->second;
}

const PackageManifest* Registry::try_find(const std::string& name, const Version& version) const {
    auto it = entries_.find(name);
    if (it == entries_.end())
        return nullptr;
    for (const auto& m : it->second) {
        if (m.version == version)
            return &m;
    }
    return nullptr;
}

const PackageManifest& Registry::find(const std::string& name, const Version& version) const {
    if (const PackageManifest* m = try_find(name, version))
        return *m;
    throw Error(ErrorKind::unknown_package,
                "registry has no entry (" + name + ", " + version.str() + ")");
}

std::vector<std::string> Registry::names() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& [name, list] : entries_)
        out.push_back(name);
    return out;
}

std::size_t Registry::entry_count() const {
    std::size_t n = 0;
    for (const auto& [name, list] : entries_)
        n += list.size();
    return n;
}

} // namespace ecoforge
