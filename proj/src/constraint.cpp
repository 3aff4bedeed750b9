#include "ecoforge/constraint.hpp"

#include <cctype>

#include "ecoforge/errors.hpp"

namespace ecoforge {

const char* comparator_op_text(ComparatorOp op) {
    switch (op) {
    case ComparatorOp::eq: return "=";
    case ComparatorOp::ge: return ">=";
    case ComparatorOp::gt: return ">";
    case ComparatorOp::le: return "<=";
    case ComparatorOp::lt: return "<";
    }
    return "?";
}

bool Comparator::matches(const Version& v) const {
    switch (op) {
    case ComparatorOp::eq: return v == version;
    case ComparatorOp::ge: return v >= version;
    case ComparatorOp::gt: return v > version;
    case ComparatorOp::le: return v <= version;
    case ComparatorOp::lt: return v < version;
    }
    return false;
}

std::string Comparator::str() const {
    return std::string(comparator_op_text(op)) + version.str();
}

bool VersionConstraint::satisfied_by(const Version& v) const {
    for (const auto& c : comparators) {
        if (!c.matches(v))
            return false;
    }
    return true;
}

std::string VersionConstraint::str() const {
    if (is_any())
        return "*";
    std::string out;
    for (const auto& c : comparators) {
        if (!out.empty())
            out += ", ";
        out += c.str();
    }
    return out;
}

bool constraint_satisfied(const VersionConstraint& c, const Version& v) {
    return c.satisfied_by(v);
}

namespace {

[[noreturn]] void fail(std::string_view text, const std::string& why) {
    throw Error(ErrorKind::malformed_constraint,
                "malformed constraint \"" + std::string(text) + "\": " + why);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t'))
        s.remove_suffix(1);
    return s;
}

Version parse_part_version(std::string_view whole, std::string_view part) {
    try {
        return parse_version(part);
    } catch (const Error& e) {
        fail(whole, e.what());
    }
}

// Desugars one comma-separated element into comparators.
void parse_element(std::string_view whole, std::string_view element,
                   std::vector<Comparator>& out) {
    if (element.empty())
        fail(whole, "empty comparator");
    if (element == "*")
        fail(whole, "\"*\" cannot be combined with other comparators");

    if (element.front() == '~') {
        Version base = parse_part_version(whole, element.substr(1));
        out.push_back({ComparatorOp::ge, base});
        out.push_back({ComparatorOp::lt, Version{base.major, base.minor + 1, 0}});
        return;
    }
    if (element.front() == '^') {
        Version base = parse_part_version(whole, element.substr(1));
        out.push_back({ComparatorOp::ge, base});
        out.push_back({ComparatorOp::lt, Version{base.major + 1, 0, 0}});
        return;
    }

    ComparatorOp op = ComparatorOp::eq;
    size_t skip = 0;
    if (element.rfind(">=", 0) == 0) {
        op = ComparatorOp::ge;
        skip = 2;
    } else if (element.rfind("<=", 0) == 0) {
        op = ComparatorOp::le;
        skip = 2;
    } else if (element.front() == '>') {
        op = ComparatorOp::gt;
        skip = 1;
    } else if (element.front() == '<') {
        op = ComparatorOp::lt;
        skip = 1;
    } else if (element.front() == '=') {
        op = ComparatorOp::eq;
        skip = 1;
    } else if (!std::isdigit(static_cast<unsigned char>(element.front()))) {
        fail(whole, "unknown operator");
    }
    // A bare version is an equality pin.
    out.push_back({op, parse_part_version(whole, trim(element.substr(skip)))});
}

} // namespace

VersionConstraint parse_constraint(std::string_view text) {
    std::string_view body = trim(text);
    if (body.empty())
        fail(text, "empty constraint");
    if (body == "*")
        return VersionConstraint::any();

    VersionConstraint result;
    size_t pos = 0;
    while (pos <= body.size()) {
        size_t comma = body.find(',', pos);
        std::string_view element =
            trim(body.substr(pos, comma == std::string_view::npos ? comma : comma - pos));
        parse_element(text, element, result.comparators);
        if (comma == std::string_view::npos)
            break;
        pos = comma + 1;
    }
    return result;
}

} // namespace ecoforge
