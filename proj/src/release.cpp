#include "ecoforge/release.hpp"

#include <algorithm>

namespace ecoforge {

const char* bump_level_name(BumpLevel level) {
    switch (level) {
    case BumpLevel::none: return "none";
    case BumpLevel::patch: return "patch";
    case BumpLevel::minor: return "minor";
    case BumpLevel::major: return "major";
    }
    return "?";
}

std::optional<BumpLevel> parse_bump_level(std::string_view text) {
    if (text == "none") return BumpLevel::none;
    if (text == "patch") return BumpLevel::patch;
    if (text == "minor") return BumpLevel::minor;
    if (text == "major") return BumpLevel::major;
    return std::nullopt;
}

BumpLevel classify_bump(const Version& old_version, const Version& new_version) {
    if (new_version == old_version)
        return BumpLevel::none;
    if (new_version < old_version)
        throw Error(ErrorKind::version_regression, "version regression: " + old_version.str() +
                                                       " -> " + new_version.str());
    if (new_version.major != old_version.major)
        return BumpLevel::major;
    if (new_version.minor != old_version.minor)
        return BumpLevel::minor;
    return BumpLevel::patch;
}

Version bump_version(const Version& v, BumpLevel level) {
    switch (level) {
    case BumpLevel::none:
        return {v.major, v.minor, v.patch, ""};
    case BumpLevel::patch:
        return {v.major, v.minor, v.patch + 1, ""};
    case BumpLevel::minor:
        return {v.major, v.minor + 1, 0, ""};
    case BumpLevel::major:
        return {v.major + 1, 0, 0, ""};
    }
    return v;
}

json snapshot_to_json(const ReleaseSnapshot& s) {
    json components = json::object();
    for (const auto& [name, version] : s.components)
        components[name] = version.str();
    return json{{"sdk_version", s.sdk_version.str()}, {"components", components}};
}

ReleaseSnapshot snapshot_from_json(const json& doc) {
    if (!doc.is_object() || !doc.contains("sdk_version") || !doc.contains("components"))
        throw Error(ErrorKind::schema_error,
                    "release snapshot must carry sdk_version and components");
    ReleaseSnapshot s;
    try {
        s.sdk_version = parse_version(doc["sdk_version"].get<std::string>());
        for (auto it = doc["components"].begin(); it != doc["components"].end(); ++it) {
            if (!is_package_identifier(it.key()))
                throw Error(ErrorKind::schema_error,
                            "component \"" + it.key() + "\" is not a valid package identifier");
            s.components[it.key()] = parse_version(it.value().get<std::string>());
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::schema_error, "malformed release snapshot: " + std::string(e.what()));
    }
    if (s.components.empty())
        throw Error(ErrorKind::schema_error, "release snapshot has no components");
    return s;
}

namespace {

void check_snapshot(const ReleaseSnapshot& s) {
    if (s.components.empty())
        throw Error(ErrorKind::invalid_input, "release snapshot has no components");
    for (const auto& [name, version] : s.components) {
        if (!is_package_identifier(name))
            throw Error(ErrorKind::invalid_input,
                        "component \"" + name + "\" is not a valid package identifier");
    }
}

// The bump level an individual component change demands from the ecosystem.
BumpLevel demanded_level(BumpLevel component_bump) {
    switch (component_bump) {
    case BumpLevel::none:
    case BumpLevel::patch:
        return BumpLevel::patch;
    default:
        return component_bump;
    }
}

} // namespace

ReleasePlan plan_release(const ReleaseSnapshot& prev,
                         const std::map<std::string, Version>& proposed) {
    check_snapshot(prev);
    if (proposed == prev.components)
        throw Error(ErrorKind::empty_plan, "proposed components equal the previous release");

    ReleasePlan plan;
    plan.previous = prev;
    plan.proposed_components = proposed;

    BumpLevel required = BumpLevel::patch;
    for (const auto& [name, new_version] : proposed) {
        auto old_it = prev.components.find(name);
        if (old_it == prev.components.end()) {
            plan.additions.insert(name);
            required = std::max(required, BumpLevel::minor);
            continue;
        }
        const BumpLevel bump = classify_bump(old_it->second, new_version);
        plan.component_bumps[name] = bump;
        required = std::max(required, demanded_level(bump));
    }
    for (const auto& [name, old_version] : prev.components) {
        if (!proposed.count(name)) {
            plan.removals.insert(name);
            required = std::max(required, BumpLevel::major);
        }
    }

    plan.required_level = required;
    plan.proposed_sdk_version = bump_version(prev.sdk_version, required);
    return plan;
}

std::vector<Violation> validate_release(const ReleasePlan& plan, BumpLevel target) {
    std::vector<Violation> out;
    const std::string target_name = bump_level_name(target);
    for (const auto& [name, bump] : plan.component_bumps) {
        if (demanded_level(bump) > target)
            out.push_back({"component " + name, std::string(bump_level_name(bump)) +
                                                    " bump exceeds " + target_name + " release"});
    }
    for (const auto& name : plan.additions) {
        if (BumpLevel::minor > target)
            out.push_back(
                {"addition " + name, "package addition requires at least a minor release"});
    }
    for (const auto& name : plan.removals) {
        if (BumpLevel::major > target)
            out.push_back({"removal " + name, "package removal requires a major release"});
    }
    return out;
}

json plan_to_json(const ReleasePlan& plan) {
    json bumps = json::object();
    for (const auto& [name, bump] : plan.component_bumps)
        bumps[name] = bump_level_name(bump);
    json proposed = json::object();
    for (const auto& [name, version] : plan.proposed_components)
        proposed[name] = version.str();
    return json{{"previous", snapshot_to_json(plan.previous)},
                {"proposed_components", proposed},
                {"component_bumps", bumps},
                {"additions", plan.additions},
                {"removals", plan.removals},
                {"required_level", bump_level_name(plan.required_level)},
                {"proposed_sdk_version", plan.proposed_sdk_version.str()}};
}

ReleasePlan plan_from_json(const json& doc) {
    ReleasePlan plan;
    try {
        plan.previous = snapshot_from_json(doc.at("previous"));
        for (auto it = doc.at("proposed_components").begin();
             it != doc.at("proposed_components").end(); ++it)
            plan.proposed_components[it.key()] = parse_version(it.value().get<std::string>());
        for (auto it = doc.at("component_bumps").begin(); it != doc.at("component_bumps").end();
             ++it) {
            const auto level = parse_bump_level(it.value().get<std::string>());
            if (!level)
                throw Error(ErrorKind::schema_error, "unknown bump level in plan");
            plan.component_bumps[it.key()] = *level;
        }
        for (const json& name : doc.at("additions"))
            plan.additions.insert(name.get<std::string>());
        for (const json& name : doc.at("removals"))
            plan.removals.insert(name.get<std::string>());
        const auto required = parse_bump_level(doc.at("required_level").get<std::string>());
        if (!required)
            throw Error(ErrorKind::schema_error, "unknown required_level in plan");
        plan.required_level = *required;
        plan.proposed_sdk_version =
            parse_version(doc.at("proposed_sdk_version").get<std::string>());
    } catch (const json::exception& e) {
        throw Error(ErrorKind::schema_error, "malformed release plan: " + std::string(e.what()));
    }
    return plan;
}

} // namespace ecoforge
