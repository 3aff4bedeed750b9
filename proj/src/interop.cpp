#include "ecoforge/interop.hpp"

#include <algorithm>
#include <sstream>

namespace ecoforge {

int InteropMatrix::level(const std::string& from, const std::string& to) const {
    auto it = cells.find({from, to});
    return it == cells.end() ? 0 : it->second;
}

InteropMatrix build_interop_matrix(const Registry& registry, const ResolutionResult& res) {
    if (!res.solved())
        throw Error(ErrorKind::invalid_input, "interop matrix requires a solved resolution");

    InteropMatrix matrix;
    for (const auto& [name, version] : res.assignment)
        matrix.packages.push_back(name); // map iteration is already sorted

    // Joint resolvability is what level 1 certifies.
    for (const auto& from : matrix.packages) {
        for (const auto& to : matrix.packages) {
            if (from != to)
                matrix.cells[{from, to}] = 1;
        }
    }

    for (const auto& [name, version] : res.assignment) {
        const PackageManifest& m = registry.find(name, version);
        for (const auto& decl : m.interop) {
            if (!res.assignment.count(decl.peer))
                continue;
            auto& cell = matrix.cells.at({name, decl.peer});
            if (decl.level == 2 && decl.direction == "accepts_data_from") {
                cell = std::max(cell, 2);
            } else if (decl.level == 3 && decl.direction == "calls") {
                const bool edge_present =
                    std::any_of(res.edges.begin(), res.edges.end(), [&](const ResolvedEdge& e) {
                        return e.from == name && e.to == decl.peer;
                    });
                if (edge_present)
                    cell = std::max(cell, 3);
            }
        }
    }
    return matrix;
}

std::vector<Violation> validate_interop(const PackageManifest& m, const Registry& registry) {
    std::vector<Violation> out;
    for (const auto& decl : m.interop) {
        if (!registry.contains(decl.peer))
            out.push_back({decl.peer, "unknown peer"});
        const bool matched = (decl.level == 1 && decl.direction == "side_by_side") ||
                             (decl.level == 2 && decl.direction == "accepts_data_from") ||
                             (decl.level == 3 && decl.direction == "calls");
        if (!matched)
            out.push_back({decl.peer, "level " + std::to_string(decl.level) +
                                          " does not match direction \"" + decl.direction +
                                          "\""});
        if (decl.level == 3 && !m.find_dependency(decl.peer))
            out.push_back({decl.peer, "level-3 peer not a dependency"});
    }
    return out;
}

std::string render_matrix(const InteropMatrix& matrix, MatrixFormat format) {
    std::ostringstream out;
    if (format == MatrixFormat::dot) {
        out << "digraph interop {\n";
        for (const auto& name : matrix.packages)
            out << "  " << name << ";\n";
        for (const auto& [pair, level] : matrix.cells) {
            if (level >= 2)
                out << "  " << pair.first << " -> " << pair.second << " [label=\"L" << level
                    << "\"];\n";
        }
        out << "}\n";
        return out.str();
    }

    size_t width = 1;
    for (const auto& name : matrix.packages)
        width = std::max(width, name.size());
    width += 2;
    auto pad = [&](const std::string& text) {
        std::string cell = text;
        cell.resize(width, ' ');
        return cell;
    };

    out << pad("");
    for (const auto& name : matrix.packages)
        out << pad(name);
    out << "\n";
    for (const auto& from : matrix.packages) {
        out << pad(from);
        for (const auto& to : matrix.packages) {
            if (from == to)
                out << pad("-");
            else
                out << pad(std::to_string(matrix.level(from, to)));
        }
        out << "\n";
    }
    return out.str();
}

json matrix_to_json(const InteropMatrix& matrix) {
    json cells = json::array();
    for (const auto& [pair, level] : matrix.cells)
        cells.push_back({{"from", pair.first}, {"to", pair.second}, {"level", level}});
    return json{{"packages", matrix.packages}, {"cells", cells}};
}

InteropMatrix matrix_from_json(const json& doc) {
    InteropMatrix matrix;
    try {
        matrix.packages = doc.at("packages").get<std::vector<std::string>>();
        for (const json& cell : doc.at("cells")) {
            matrix.cells[{cell.at("from").get<std::string>(), cell.at("to").get<std::string>()}] =
                cell.at("level").get<int>();
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::schema_error,
                    "malformed interop matrix: " + std::string(e.what()));
    }
    return matrix;
}

} // namespace ecoforge
