#include "ecoforge/resolver.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace ecoforge {

namespace {

struct TrackedDemand {
    Demand demand;
    bool required = true;
};

// No stored version satisfies every demand in the set.
bool demands_unsatisfiable(const std::vector<PackageManifest>& stored,
                           const std::vector<TrackedDemand>& demands) {
    for (const auto& m : stored) {
        bool all_ok = true;
        for (const auto& d : demands) {
            if (!d.demand.constraint.satisfied_by(m.version)) {
                all_ok = false;
                break;
            }
        }
        if (all_ok)
            return false;
    }
    return true;
}

class Solver {
public:
    Solver(const Registry& registry, const std::vector<RootSpec>& roots)
        : registry_(registry), roots_(roots) {}

    ResolutionResult run() {
        if (roots_.empty())
            throw Error(ErrorKind::invalid_input, "resolve requires at least one root");

        for (const auto& root : roots_) {
            if (!registry_.contains(root.name))
                throw Error(ErrorKind::unknown_package,
                            "root \"" + root.name + "\" is not in the registry");
            add_demand(root.name, {"(root)", root.constraint}, /*required=*/true);
        }

        ResolutionResult result;
        result.roots = roots_;
        if (search()) {
            result.outcome = ResolutionOutcome::solved;
            result.assignment = assignment_;
            result.edges = induced_edges();
            result.decisions = std::move(decisions_);
            reject_required_cycles(result);
            return result;
        }

        result.outcome = ResolutionOutcome::conflict;
        result.decisions = std::move(decisions_);
        result.conflict = make_explanation();
        return result;
    }

private:
    struct TrailEntry {
        std::vector<std::string> demand_targets; // to pop, in push order
        size_t agenda_size = 0;
    };

    const Registry& registry_;
    const std::vector<RootSpec>& roots_;

    std::map<std::string, Version> assignment_;
    std::map<std::string, std::vector<TrackedDemand>> demands_;
    std::vector<std::string> agenda_; // required targets in discovery order
    std::vector<Decision> decisions_;

    // Firsts for conflict reporting.
    std::optional<ConflictExplanation> first_exhaustion_;
    std::map<std::string, std::vector<TrackedDemand>> demand_history_;
    std::vector<std::string> demand_history_order_;

    void add_demand(const std::string& target, Demand demand, bool required) {
        auto& list = demands_[target];
        list.push_back({std::move(demand), required});
        if (required && std::find(agenda_.begin(), agenda_.end(), target) == agenda_.end())
            agenda_.push_back(target);

        if (!demand_history_.count(target))
            demand_history_order_.push_back(target);
        auto& history = demand_history_[target];
        const TrackedDemand& added = list.back();
        if (std::find_if(history.begin(), history.end(), [&](const TrackedDemand& d) {
                return d.demand == added.demand;
            }) == history.end())
            history.push_back(added);
    }

    const std::string* next_unassigned() const {
        for (const auto& name : agenda_) {
            if (!assignment_.count(name))
                return &name;
        }
        return nullptr;
    }

    std::vector<Version> available_versions(const std::string& name) const {
        std::vector<Version> out;
        for (const auto& m : registry_.versions_of(name))
            out.push_back(m.version);
        return out;
    }

    void record_exhaustion(const std::string& package) {
        if (first_exhaustion_)
            return;
        first_exhaustion_ = build_explanation(package, demands_.at(package));
    }

    ConflictExplanation build_explanation(const std::string& package,
                                          const std::vector<TrackedDemand>& demands) const {
        ConflictExplanation expl;
        expl.package = package;
        for (const auto& d : demands) {
            if (std::find(expl.demands.begin(), expl.demands.end(), d.demand) ==
                expl.demands.end())
                expl.demands.push_back(d.demand);
        }
        std::sort(expl.demands.begin(), expl.demands.end(), [](const Demand& a, const Demand& b) {
            if (a.from != b.from)
                return a.from < b.from;
            return a.constraint.str() < b.constraint.str();
        });
        expl.available = available_versions(package);
        return expl;
    }

    // Applies the dependency edges of a freshly assigned package. Returns
    // false when an edge to an already assigned target is violated.
    bool apply_dependencies(const PackageManifest& m, TrailEntry& trail) {
        for (const auto& dep : m.dependencies) {
            const bool required = dep.kind == DependencyKind::required;
            if (!registry_.contains(dep.name)) {
                if (!required)
                    continue; // an absent optional target constrains nothing
                throw Error(ErrorKind::unknown_package,
                            "package \"" + m.name + "\" requires unknown package \"" + dep.name +
                                "\"");
            }
            add_demand(dep.name, {m.name, dep.constraint}, required);
            trail.demand_targets.push_back(dep.name);

            auto assigned = assignment_.find(dep.name);
            if (assigned != assignment_.end() &&
                !dep.constraint.satisfied_by(assigned->second)) {
                // The union demand set certifies a conflict only when it is
                // genuinely unsatisfiable; otherwise backtracking may still
                // repair the assignment.
                if (!first_exhaustion_ &&
                    demands_unsatisfiable(registry_.versions_of(dep.name),
                                          demands_.at(dep.name)))
                    first_exhaustion_ = build_explanation(dep.name, demands_.at(dep.name));
                decisions_.push_back({m.name, m.version,
                                      "rejected: requires " + dep.name + " " +
                                          dep.constraint.str() + " but " + dep.name + " is " +
                                          assigned->second.str()});
                return false;
            }
        }
        return true;
    }

    void undo(const std::string& package, const TrailEntry& trail) {
        for (auto it = trail.demand_targets.rbegin(); it != trail.demand_targets.rend(); ++it)
            demands_.at(*it).pop_back();
        agenda_.resize(trail.agenda_size);
        assignment_.erase(package);
    }

    bool search() {
        const std::string* next = next_unassigned();
        if (!next)
            return true;
        const std::string package = *next;

        const auto& stored = registry_.versions_of(package);
        const auto& demands = demands_.at(package);

        bool any_viable = false;
        for (const auto& manifest : stored) { // newest first
            bool viable = true;
            for (const auto& d : demands) {
                if (!d.demand.constraint.satisfied_by(manifest.version)) {
                    viable = false;
                    break;
                }
            }
            if (!viable) {
                decisions_.push_back(
                    {package, manifest.version, "rejected: does not satisfy demands"});
                continue;
            }
            any_viable = true;

            TrailEntry trail;
            trail.agenda_size = agenda_.size();
            assignment_.emplace(package, manifest.version);
            decisions_.push_back({package, manifest.version, "assigned"});

            if (apply_dependencies(manifest, trail) && search())
                return true;

            undo(package, trail);
            decisions_.push_back({package, manifest.version, "backtracked"});
        }

        if (!any_viable)
            record_exhaustion(package);
        return false;
    }

    ConflictExplanation make_explanation() {
        if (first_exhaustion_)
            return *first_exhaustion_;
        // Every branch died on edge violations that were individually
        // repairable. The accumulated demand history still certifies the
        // contested package.
        for (const auto& name : demand_history_order_) {
            const auto& history = demand_history_.at(name);
            if (demands_unsatisfiable(registry_.versions_of(name), history))
                return build_explanation(name, history);
        }
        return build_explanation(demand_history_order_.front(),
                                 demand_history_.at(demand_history_order_.front()));
    }

    std::vector<ResolvedEdge> induced_edges() const {
        std::vector<ResolvedEdge> edges;
        for (const auto& [name, version] : assignment_) {
            const PackageManifest& m = registry_.find(name, version);
            for (const auto& dep : m.dependencies) {
                if (!assignment_.count(dep.name))
                    continue; // absent optional target
                edges.push_back(
                    {name, dep.name, dep.constraint, dep.kind == DependencyKind::required});
            }
        }
        return edges;
    }

    void reject_required_cycles(const ResolutionResult& result) const {
        std::map<std::string, std::vector<std::string>> adjacency;
        for (const auto& e : result.edges) {
            if (e.required)
                adjacency[e.from].push_back(e.to);
        }
        std::map<std::string, int> state; // 0 new, 1 visiting, 2 done
        std::vector<std::string> path;

        auto visit = [&](auto&& self, const std::string& node) -> void {
            state[node] = 1;
            path.push_back(node);
            for (const auto& next : adjacency[node]) {
                if (state[next] == 1) {
                    std::string cycle;
                    auto start = std::find(path.begin(), path.end(), next);
                    for (auto it = start; it != path.end(); ++it)
                        cycle += *it + " -> ";
                    cycle += next;
                    throw Error(ErrorKind::cycle_error,
                                "required-dependency cycle: " + cycle);
                }
                if (state[next] == 0)
                    self(self, next);
            }
            path.pop_back();
            state[node] = 2;
        };
        for (const auto& [name, version] : result.assignment) {
            if (state[name] == 0)
                visit(visit, name);
        }
    }
};

} // namespace

ResolutionResult resolve(const Registry& registry, const std::vector<RootSpec>& roots) {
    return Solver(registry, roots).run();
}

std::vector<std::pair<std::string, Version>> build_order(const ResolutionResult& res) {
    if (!res.solved())
        throw Error(ErrorKind::invalid_input, "build order requires a solved resolution");

    std::map<std::string, int> indegree;
    std::map<std::string, std::vector<std::string>> dependents;
    for (const auto& [name, version] : res.assignment)
        indegree[name] = 0;
    for (const auto& e : res.edges) {
        if (!e.required)
            continue;
        ++indegree[e.from];            // `from` waits on `to`
        dependents[e.to].push_back(e.from);
    }

    std::set<std::string> ready;
    for (const auto& [name, degree] : indegree) {
        if (degree == 0)
            ready.insert(name);
    }

    std::vector<std::pair<std::string, Version>> order;
    while (!ready.empty()) {
        const std::string name = *ready.begin(); // ascending-name tie break
        ready.erase(ready.begin());
        order.emplace_back(name, res.assignment.at(name));
        for (const auto& dependent : dependents[name]) {
            if (--indegree[dependent] == 0)
                ready.insert(dependent);
        }
    }
    if (order.size() != res.assignment.size())
        throw Error(ErrorKind::cycle_error, "required-dependency cycle in resolution");
    return order;
}

std::vector<std::pair<std::string, Version>> export_dependency_list(const ResolutionResult& res,
                                                                    const std::string& root) {
    if (!res.solved())
        throw Error(ErrorKind::invalid_input, "dependency export requires a solved resolution");
    if (!res.assignment.count(root))
        throw Error(ErrorKind::unknown_package, "\"" + root + "\" is not assigned");

    std::map<std::string, std::vector<std::string>> requires_edges;
    for (const auto& e : res.edges) {
        if (e.required)
            requires_edges[e.from].push_back(e.to);
    }

    std::set<std::string> closure;
    std::vector<std::string> queue{root};
    while (!queue.empty()) {
        const std::string current = queue.back();
        queue.pop_back();
        for (const auto& dep : requires_edges[current]) {
            if (closure.insert(dep).second)
                queue.push_back(dep);
        }
    }
    closure.erase(root);

    std::vector<std::pair<std::string, Version>> out;
    for (const auto& [name, version] : build_order(res)) {
        if (closure.count(name))
            out.emplace_back(name, version);
    }
    return out;
}

std::string explain_conflict(const ConflictExplanation& c) {
    std::ostringstream out;
    out << "no version of " << c.package << " satisfies all demands:\n";
    for (const auto& d : c.demands)
        out << "  " << d.from << " requires " << c.package << " " << d.constraint.str() << "\n";
    out << "available versions of " << c.package << ": ";
    for (size_t i = 0; i < c.available.size(); ++i) {
        if (i)
            out << ", ";
        out << c.available[i].str();
    }
    out << "\n";
    return out.str();
}

json lockfile_to_json(const ResolutionResult& res) {
    if (!res.solved())
        throw Error(ErrorKind::invalid_input, "only solved resolutions produce lockfiles");
    json doc;
    json roots = json::array();
    for (const auto& r : res.roots)
        roots.push_back({{"name", r.name}, {"constraint", r.constraint.str()}});
    doc["roots"] = roots;

    json assignment = json::object();
    for (const auto& [name, version] : res.assignment)
        assignment[name] = version.str();
    doc["assignment"] = assignment;

    json order = json::array();
    for (const auto& [name, version] : build_order(res))
        order.push_back({{"name", name}, {"version", version.str()}});
    doc["build_order"] = order;
    return doc;
}

ResolutionResult resolution_from_lockfile(const json& doc, const Registry& registry) {
    if (!doc.is_object() || !doc.contains("roots") || !doc.contains("assignment") ||
        !doc.contains("build_order"))
        throw Error(ErrorKind::schema_error,
                    "lockfile must carry roots, assignment, and build_order");

    ResolutionResult res;
    res.outcome = ResolutionOutcome::solved;
    for (const json& r : doc["roots"])
        res.roots.push_back(
            {r.at("name").get<std::string>(), parse_constraint(r.at("constraint").get<std::string>())});
    for (auto it = doc["assignment"].begin(); it != doc["assignment"].end(); ++it)
        res.assignment[it.key()] = parse_version(it.value().get<std::string>());

    for (const auto& [name, version] : res.assignment) {
        const PackageManifest& m = registry.find(name, version);
        for (const auto& dep : m.dependencies) {
            const bool required = dep.kind == DependencyKind::required;
            auto assigned = res.assignment.find(dep.name);
            if (assigned == res.assignment.end()) {
                if (required)
                    throw Error(ErrorKind::invariant_error,
                                "lockfile omits required dependency " + dep.name + " of " + name);
                continue;
            }
            if (!dep.constraint.satisfied_by(assigned->second))
                throw Error(ErrorKind::invariant_error,
                            "lockfile assignment violates " + name + " -> " + dep.name + " " +
                                dep.constraint.str());
            res.edges.push_back({name, dep.name, dep.constraint, required});
        }
    }
    return res;
}

} // namespace ecoforge
