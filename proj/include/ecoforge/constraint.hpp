#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ecoforge/version.hpp"

namespace ecoforge {

enum class ComparatorOp { eq, ge, gt, le, lt };

const char* comparator_op_text(ComparatorOp op);

struct Comparator {
    ComparatorOp op;
    Version version;

    bool matches(const Version& v) const;
    std::string str() const;

    bool operator==(const Comparator&) const = default;
};

/// Conjunction of comparators over versions. An empty comparator list is the
/// wildcard constraint ANY. Contradictory comparator sets are representable;
/// they simply match nothing.
struct VersionConstraint {
    std::vector<Comparator> comparators;

    static VersionConstraint any() { return {}; }
    bool is_any() const { return comparators.empty(); }

    bool satisfied_by(const Version& v) const;

    /// "*" for ANY, otherwise comparators joined with ", ".
    std::string str() const;

    bool operator==(const VersionConstraint&) const = default;
};

/// Parses a constraint expression: "*", a comma-separated conjunction of
/// comparators ("<op>X.Y.Z"), the shorthands "~X.Y.Z" and "^X.Y.Z" (desugared
/// before storage), or a bare version (an equality pin). Throws
/// Error{malformed_constraint} on unknown operators or bad version parts.
VersionConstraint parse_constraint(std::string_view text);

/// True iff v satisfies every comparator of c (ANY always holds).
bool constraint_satisfied(const VersionConstraint& c, const Version& v);

} // namespace ecoforge
