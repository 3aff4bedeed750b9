#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ecoforge/resolver.hpp"

namespace ecoforge {

/// Pairwise interoperability levels over a resolved package set. Level 1
/// (side-by-side co-use) is established for every ordered pair by the joint
/// resolution itself; declared levels 2 and 3 upgrade individual directed
/// cells.
struct InteropMatrix {
    std::vector<std::string> packages;                      // sorted
    std::map<std::pair<std::string, std::string>, int> cells; // (from, to) -> 1..3

    int level(const std::string& from, const std::string& to) const;

    bool operator==(const InteropMatrix&) const = default;
};

/// Builds the matrix for a solved resolution: base level 1 everywhere,
/// level 2 where the from-package declares accepts_data_from(to), level 3
/// where it declares calls(to) and the dependency edge exists in the
/// assignment graph. Throws Error{invalid_input} on conflict results.
InteropMatrix build_interop_matrix(const Registry& registry, const ResolutionResult& res);

/// Structural validation of one manifest's declarations against a registry:
/// unknown peers, level-3 peers missing from dependencies, and
/// level/direction disagreements.
std::vector<Violation> validate_interop(const PackageManifest& m, const Registry& registry);

enum class MatrixFormat { text, dot };

/// text: square level table with a "-" diagonal; dot: DOT graph with one
/// labeled edge per cell of level 2 or higher. Deterministic ordering.
std::string render_matrix(const InteropMatrix& matrix, MatrixFormat format);

json matrix_to_json(const InteropMatrix& matrix);
InteropMatrix matrix_from_json(const json& doc);

} // namespace ecoforge
