#pragma once

// Shared test scaffolding: fixture paths, temp dirs, a random registry
// generator, and the exhaustive-enumeration oracle the resolver is checked
// against. The oracle evaluates constraints directly and never calls the
// solver.

#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ecoforge/manifest.hpp"
#include "ecoforge/registry.hpp"
#include "ecoforge/resolver.hpp"

namespace testsupport {

namespace fs = std::filesystem;
using namespace ecoforge;

inline fs::path fixture_dir() { return fs::path(ECOFORGE_FIXTURE_DIR); }

class TempDir {
public:
    TempDir() {
        std::string tmpl = (fs::temp_directory_path() / "ecoforge-test-XXXXXX").string();
        if (!mkdtemp(tmpl.data()))
            throw std::runtime_error("mkdtemp failed");
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

inline void copy_tree(const fs::path& from, const fs::path& to) {
    fs::create_directories(to);
    fs::copy(from, to, fs::copy_options::recursive | fs::copy_options::overwrite_existing);
}

inline PackageManifest make_manifest(const std::string& name, const std::string& version,
                                     std::vector<Dependency> deps = {},
                                     std::vector<InteropDeclaration> interop = {}) {
    PackageManifest m;
    m.name = name;
    m.version = parse_version(version);
    m.license = "MIT";
    m.contact = name + "-dev@example.org";
    m.dependencies = std::move(deps);
    m.build.system = "autoconf";
    m.build.configure_command = "./configure --prefix={prefix}";
    for (const auto& d : m.dependencies) {
        if (d.kind == DependencyKind::required)
            m.build.configure_command += " --with-" + d.name + "-dir={dep_dir:" + d.name + "}";
    }
    m.build.build_command = "make";
    m.build.install_command = "make install";
    m.namespace_prefixes = {name + "_"};
    m.interop = std::move(interop);
    return m;
}

inline Dependency dep(const std::string& name, const std::string& constraint,
                      DependencyKind kind = DependencyKind::required) {
    return {name, parse_constraint(constraint), kind};
}

// ---------------------------------------------------------------------------
// Random instances for the resolver and scheduler properties. Dependency
// targets always point at higher-indexed packages, so instances are acyclic
// by construction.
// ---------------------------------------------------------------------------

struct RandomInstance {
    Registry registry;
    std::vector<RootSpec> roots;
};

inline RandomInstance random_instance(std::mt19937& rng, int max_packages = 5,
                                      int max_versions = 4) {
    std::uniform_int_distribution<int> pkg_count(1, max_packages);
    const int n = pkg_count(rng);

    std::vector<std::string> names;
    for (int i = 0; i < n; ++i)
        names.push_back("pkg" + std::string(1, static_cast<char>('a' + i)));

    // Version pools per package.
    std::vector<std::vector<Version>> versions(static_cast<size_t>(n));
    std::uniform_int_distribution<int> version_count(1, max_versions);
    std::uniform_int_distribution<int> major(1, 3);
    std::uniform_int_distribution<int> minor(0, 2);
    std::uniform_int_distribution<int> patch(0, 1);
    for (int i = 0; i < n; ++i) {
        std::set<Version> pool;
        const int count = version_count(rng);
        while (static_cast<int>(pool.size()) < count)
            pool.insert(Version{major(rng), minor(rng), patch(rng)});
        versions[i] = {pool.begin(), pool.end()};
    }

    auto random_constraint = [&](int target) {
        std::uniform_int_distribution<size_t> pick(0, versions[target].size() - 1);
        const Version v = versions[target][pick(rng)];
        std::uniform_int_distribution<int> kind(0, 7);
        VersionConstraint c;
        switch (kind(rng)) {
        case 0: return VersionConstraint::any();
        case 1:
        case 2:
        case 3: c.comparators.push_back({ComparatorOp::eq, v}); break;
        case 4: c.comparators.push_back({ComparatorOp::ge, v}); break;
        case 5: c.comparators.push_back({ComparatorOp::le, v}); break;
        case 6:
            c.comparators.push_back({ComparatorOp::ge, v});
            c.comparators.push_back({ComparatorOp::lt, Version{v.major, v.minor + 1, 0}});
            break;
        default:
            // Deliberately often unsatisfiable: pins a version that may not
            // be stored at all.
            c.comparators.push_back({ComparatorOp::eq, Version{v.major, v.minor, v.patch + 2}});
            break;
        }
        return c;
    };

    RandomInstance instance;
    std::uniform_real_distribution<double> chance(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
        for (const Version& v : versions[i]) {
            std::vector<Dependency> deps;
            for (int j = i + 1; j < n; ++j) {
                if (chance(rng) < 0.5) {
                    const auto kind =
                        chance(rng) < 0.8 ? DependencyKind::required : DependencyKind::optional;
                    deps.push_back({names[j], random_constraint(j), kind});
                }
            }
            instance.registry.add(make_manifest(names[i], v.str(), std::move(deps)));
        }
    }

    // One to three random roots, constraint ANY or a random range.
    std::uniform_int_distribution<int> root_count(1, std::min(3, n));
    std::uniform_int_distribution<int> root_pick(0, n - 1);
    std::set<int> chosen;
    const int k = root_count(rng);
    while (static_cast<int>(chosen.size()) < k)
        chosen.insert(root_pick(rng));
    for (int i : chosen) {
        const bool pinned = chance(rng) < 0.3;
        instance.roots.push_back({names[i], pinned ? random_constraint(i)
                                                   : VersionConstraint::any()});
    }
    return instance;
}

/// Always-satisfiable DAG instance for scheduler properties: one version per
/// package, ANY constraints, random required edges.
inline RandomInstance random_dag_instance(std::mt19937& rng, int max_packages = 8) {
    std::uniform_int_distribution<int> pkg_count(2, max_packages);
    const int n = pkg_count(rng);
    std::uniform_real_distribution<double> chance(0.0, 1.0);

    RandomInstance instance;
    for (int i = 0; i < n; ++i) {
        const std::string name = "task" + std::string(1, static_cast<char>('a' + i));
        std::vector<Dependency> deps;
        for (int j = i + 1; j < n; ++j) {
            if (chance(rng) < 0.35)
                deps.push_back({"task" + std::string(1, static_cast<char>('a' + j)),
                                VersionConstraint::any(), DependencyKind::required});
        }
        instance.registry.add(make_manifest(name, "1.0.0", std::move(deps)));
        instance.roots.push_back({name, VersionConstraint::any()});
    }
    return instance;
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration oracle: a satisfying assignment exists iff some
// choice of "absent or one stored version" per package covers the roots,
// satisfies every required edge, and satisfies optional edges whose target
// is present.
// ---------------------------------------------------------------------------

inline bool assignment_valid(const Registry& registry, const std::vector<RootSpec>& roots,
                             const std::map<std::string, Version>& assignment) {
    for (const auto& root : roots) {
        auto it = assignment.find(root.name);
        if (it == assignment.end() || !root.constraint.satisfied_by(it->second))
            return false;
    }
    for (const auto& [name, version] : assignment) {
        const PackageManifest* m = registry.try_find(name, version);
        if (!m)
            return false;
        for (const auto& d : m->dependencies) {
            auto it = assignment.find(d.name);
            if (it == assignment.end()) {
                if (d.kind == DependencyKind::required)
                    return false;
                continue;
            }
            if (!d.constraint.satisfied_by(it->second))
                return false;
        }
    }
    return true;
}

inline bool oracle_solvable(const Registry& registry, const std::vector<RootSpec>& roots) {
    const std::vector<std::string> names = registry.names();
    std::map<std::string, Version> assignment;

    auto enumerate = [&](auto&& self, size_t index) -> bool {
        if (index == names.size())
            return assignment_valid(registry, roots, assignment);
        if (self(self, index + 1)) // package absent
            return true;
        for (const auto& m : registry.versions_of(names[index])) {
            assignment[names[index]] = m.version;
            if (self(self, index + 1))
                return true;
            assignment.erase(names[index]);
        }
        return false;
    };
    return enumerate(enumerate, 0);
}

/// Independent edge checker for solved results: walks the registry, not the
/// solver's own edge list.
inline bool recheck_solution(const Registry& registry, const std::vector<RootSpec>& roots,
                             const ResolutionResult& res) {
    if (!res.solved())
        return false;
    if (!assignment_valid(registry, roots, res.assignment))
        return false;
    // Exactly one version per name is implied by the map; also insist every
    // root's required closure is assigned.
    for (const auto& root : roots) {
        if (!res.assignment.count(root.name))
            return false;
    }
    return true;
}

inline bool explanation_unsatisfiable(const Registry& registry, const ConflictExplanation& c) {
    if (!registry.contains(c.package))
        return false;
    for (const auto& m : registry.versions_of(c.package)) {
        bool all_ok = true;
        for (const auto& d : c.demands) {
            if (!d.constraint.satisfied_by(m.version)) {
                all_ok = false;
                break;
            }
        }
        if (all_ok)
            return false;
    }
    return true;
}

} // namespace testsupport
