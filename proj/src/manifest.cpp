#include "ecoforge/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "ecoforge/policy_id.hpp"

namespace ecoforge {

bool is_package_identifier(std::string_view name) {
    if (name.empty() || !std::islower(static_cast<unsigned char>(name.front())))
        return false;
    return std::all_of(name.begin(), name.end(), [](char c) {
        return std::islower(static_cast<unsigned char>(c)) ||
               std::isdigit(static_cast<unsigned char>(c)) || c == '-';
    });
}

const Dependency* PackageManifest::find_dependency(std::string_view dep_name) const {
    for (const auto& d : dependencies) {
        if (d.name == dep_name)
            return &d;
    }
    return nullptr;
}

bool PackageManifest::has_attestation(const std::string& policy_id) const {
    auto it = attestations.find(policy_id);
    return it != attestations.end() && !it->second.empty();
}

namespace {

[[noreturn]] void schema_fail(const std::string& where, const std::string& why) {
    throw Error(ErrorKind::schema_error, "manifest " + where + ": " + why);
}

const json& require_key(const json& obj, const std::string& where, const std::string& key) {
    auto it = obj.find(key);
    if (it == obj.end())
        schema_fail(where, "missing required key \"" + key + "\"");
    return *it;
}

std::string get_string(const json& obj, const std::string& where, const std::string& key) {
    const json& value = require_key(obj, where, key);
    if (!value.is_string())
        schema_fail(where, "key \"" + key + "\" must be a string");
    return value.get<std::string>();
}

std::string get_string_or(const json& obj, const std::string& where, const std::string& key,
                          const std::string& fallback) {
    auto it = obj.find(key);
    if (it == obj.end())
        return fallback;
    if (!it->is_string())
        schema_fail(where, "key \"" + key + "\" must be a string");
    return it->get<std::string>();
}

bool get_bool_or(const json& obj, const std::string& where, const std::string& key,
                 bool fallback) {
    auto it = obj.find(key);
    if (it == obj.end())
        return fallback;
    if (!it->is_boolean())
        schema_fail(where, "key \"" + key + "\" must be a boolean");
    return it->get<bool>();
}

void reject_unknown_keys(const json& obj, const std::string& where,
                         const std::set<std::string>& known) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!known.count(it.key()))
            schema_fail(where, "unknown key \"" + it.key() + "\"");
    }
}

Version parse_version_field(const std::string& where, const std::string& text) {
    try {
        return parse_version(text);
    } catch (const Error& e) {
        schema_fail(where, e.what());
    }
}

VersionConstraint parse_constraint_field(const std::string& where, const std::string& text) {
    try {
        return parse_constraint(text);
    } catch (const Error& e) {
        schema_fail(where, e.what());
    }
}

BuildSpec parse_build(const json& obj) {
    if (!obj.is_object())
        schema_fail("build", "must be an object");
    reject_unknown_keys(obj, "build",
                        {"system", "configure_command", "build_command", "install_command",
                         "supports_64bit", "supports_shared"});
    BuildSpec b;
    b.system = get_string(obj, "build", "system");
    b.configure_command = get_string(obj, "build", "configure_command");
    b.build_command = get_string(obj, "build", "build_command");
    b.install_command = get_string(obj, "build", "install_command");
    b.supports_64bit = get_bool_or(obj, "build", "supports_64bit", false);
    b.supports_shared = get_bool_or(obj, "build", "supports_shared", false);
    return b;
}

std::vector<Dependency> parse_dependencies(const json& arr) {
    if (!arr.is_array())
        schema_fail("dependencies", "must be an array");
    std::vector<Dependency> deps;
    size_t i = 0;
    for (const json& item : arr) {
        const std::string where = "dependencies[" + std::to_string(i++) + "]";
        if (!item.is_object())
            schema_fail(where, "must be an object");
        reject_unknown_keys(item, where, {"name", "constraint", "kind"});
        Dependency d;
        d.name = get_string(item, where, "name");
        d.constraint = parse_constraint_field(where, get_string(item, where, "constraint"));
        const std::string kind = get_string_or(item, where, "kind", "required");
        if (kind == "required")
            d.kind = DependencyKind::required;
        else if (kind == "optional")
            d.kind = DependencyKind::optional;
        else
            schema_fail(where, "kind must be \"required\" or \"optional\"");
        deps.push_back(std::move(d));
    }
    return deps;
}

std::vector<InteropDeclaration> parse_interop(const json& arr) {
    if (!arr.is_array())
        schema_fail("interop", "must be an array");
    std::vector<InteropDeclaration> decls;
    size_t i = 0;
    for (const json& item : arr) {
        const std::string where = "interop[" + std::to_string(i++) + "]";
        if (!item.is_object())
            schema_fail(where, "must be an object");
        reject_unknown_keys(item, where, {"peer", "level", "direction", "mechanism"});
        InteropDeclaration decl;
        decl.peer = get_string(item, where, "peer");
        const json& level = require_key(item, where, "level");
        if (!level.is_number_integer())
            schema_fail(where, "level must be an integer");
        decl.level = level.get<int>();
        decl.direction = get_string(item, where, "direction");
        decl.mechanism = get_string_or(item, where, "mechanism", "");
        decls.push_back(std::move(decl));
    }
    return decls;
}

std::map<std::string, std::string> parse_attestations(const json& obj) {
    if (!obj.is_object())
        schema_fail("attestations", "must be an object");
    std::map<std::string, std::string> result;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!parse_policy_id(it.key()))
            schema_fail("attestations", "unknown policy id \"" + it.key() + "\"");
        if (!it->is_string() || it->get<std::string>().empty())
            schema_fail("attestations",
                        "statement for " + it.key() + " must be a non-empty string");
        result[it.key()] = it->get<std::string>();
    }
    return result;
}

// Checks that a command template references only the allowed placeholders.
void check_template(const std::string& field, const std::string& text,
                    std::vector<Violation>& out) {
    size_t pos = 0;
    while ((pos = text.find('{', pos)) != std::string::npos) {
        size_t end = text.find('}', pos);
        if (end == std::string::npos) {
            out.push_back({field, "unterminated placeholder"});
            return;
        }
        const std::string token = text.substr(pos + 1, end - pos - 1);
        bool ok = token == "prefix" || token == "debug" || token == "64bit";
        if (!ok && token.rfind("dep_dir:", 0) == 0)
            ok = is_package_identifier(token.substr(8));
        if (!ok)
            out.push_back({field, "unknown placeholder {" + token + "}"});
        pos = end + 1;
    }
}

} // namespace

std::vector<Violation> validate_manifest(const PackageManifest& m) {
    std::vector<Violation> out;

    if (!is_package_identifier(m.name))
        out.push_back({"name", "not a valid package identifier"});
    if (m.version.major < 0 || m.version.minor < 0 || m.version.patch < 0)
        out.push_back({"version", "components must be non-negative"});
    if (m.namespace_prefixes.empty())
        out.push_back({"namespace_prefixes", "namespace_prefixes empty"});

    for (const auto& d : m.dependencies) {
        if (!is_package_identifier(d.name))
            out.push_back({"dependencies", "dependency name \"" + d.name +
                                               "\" is not a valid package identifier"});
        if (d.name == m.name)
            out.push_back({"dependencies", "self-dependency"});
    }

    if (m.build.system != "autoconf" && m.build.system != "cmake" && m.build.system != "script")
        out.push_back({"build.system", "must be autoconf, cmake, or script"});
    check_template("build.configure_command", m.build.configure_command, out);
    check_template("build.build_command", m.build.build_command, out);
    check_template("build.install_command", m.build.install_command, out);

    for (const auto& decl : m.interop) {
        if (!is_package_identifier(decl.peer))
            out.push_back({"interop", "peer \"" + decl.peer +
                                          "\" is not a valid package identifier"});
        const bool matched = (decl.level == 1 && decl.direction == "side_by_side") ||
                             (decl.level == 2 && decl.direction == "accepts_data_from") ||
                             (decl.level == 3 && decl.direction == "calls");
        if (!matched)
            out.push_back({"interop", "level " + std::to_string(decl.level) +
                                          " does not match direction \"" + decl.direction +
                                          "\" for peer " + decl.peer});
        if (decl.level == 3 && !m.find_dependency(decl.peer))
            out.push_back({"interop",
                           "level-3 peer " + decl.peer + " is not listed as a dependency"});
    }

    for (const auto& [id, statement] : m.attestations) {
        if (!parse_policy_id(id))
            out.push_back({"attestations", "unknown policy id \"" + id + "\""});
        else if (statement.empty())
            out.push_back({"attestations", "empty statement for " + id});
    }

    return out;
}

PackageManifest parse_manifest(const std::string& document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::parse_error, std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!doc.is_object())
        schema_fail("document", "top level must be an object");

    reject_unknown_keys(doc, "document",
                        {"name", "version", "license", "contact", "repo_url", "repo_public",
                         "dependencies", "build", "namespace_prefixes", "test_command",
                         "version_api", "error_handling_doc", "interop", "attestations"});

    PackageManifest m;
    m.name = get_string(doc, "document", "name");
    m.version = parse_version_field("document", get_string(doc, "document", "version"));
    m.license = get_string(doc, "document", "license");
    m.contact = get_string(doc, "document", "contact");
    m.repo_url = get_string_or(doc, "document", "repo_url", "");
    m.repo_public = get_bool_or(doc, "document", "repo_public", false);
    if (doc.contains("dependencies"))
        m.dependencies = parse_dependencies(doc["dependencies"]);
    m.build = parse_build(require_key(doc, "document", "build"));

    const json& prefixes = require_key(doc, "document", "namespace_prefixes");
    if (!prefixes.is_array())
        schema_fail("namespace_prefixes", "must be an array of strings");
    for (const json& p : prefixes) {
        if (!p.is_string())
            schema_fail("namespace_prefixes", "must be an array of strings");
        m.namespace_prefixes.push_back(p.get<std::string>());
    }

    m.test_command = get_string_or(doc, "document", "test_command", "");
    m.version_api = get_string_or(doc, "document", "version_api", "");
    m.error_handling_doc = get_string_or(doc, "document", "error_handling_doc", "");
    if (doc.contains("interop"))
        m.interop = parse_interop(doc["interop"]);
    if (doc.contains("attestations"))
        m.attestations = parse_attestations(doc["attestations"]);

    const auto violations = validate_manifest(m);
    if (!violations.empty()) {
        std::string msg = "manifest for \"" + m.name + "\" violates invariants:";
        for (const auto& v : violations)
            msg += "\n  " + v.str();
        throw Error(ErrorKind::invariant_error, msg);
    }
    return m;
}

json manifest_to_json(const PackageManifest& m) {
    json doc;
    doc["name"] = m.name;
    doc["version"] = m.version.str();
    doc["license"] = m.license;
    doc["contact"] = m.contact;
    if (!m.repo_url.empty())
        doc["repo_url"] = m.repo_url;
    doc["repo_public"] = m.repo_public;

    json deps = json::array();
    for (const auto& d : m.dependencies) {
        deps.push_back({{"name", d.name},
                        {"constraint", d.constraint.str()},
                        {"kind", d.kind == DependencyKind::required ? "required" : "optional"}});
    }
    doc["dependencies"] = deps;

    doc["build"] = {{"system", m.build.system},
                    {"configure_command", m.build.configure_command},
                    {"build_command", m.build.build_command},
                    {"install_command", m.build.install_command},
                    {"supports_64bit", m.build.supports_64bit},
                    {"supports_shared", m.build.supports_shared}};
    doc["namespace_prefixes"] = m.namespace_prefixes;
    if (!m.test_command.empty())
        doc["test_command"] = m.test_command;
    if (!m.version_api.empty())
        doc["version_api"] = m.version_api;
    if (!m.error_handling_doc.empty())
        doc["error_handling_doc"] = m.error_handling_doc;

    json interop = json::array();
    for (const auto& decl : m.interop) {
        interop.push_back({{"peer", decl.peer},
                           {"level", decl.level},
                           {"direction", decl.direction},
                           {"mechanism", decl.mechanism}});
    }
    doc["interop"] = interop;
    doc["attestations"] = m.attestations;
    return doc;
}

} // namespace ecoforge
