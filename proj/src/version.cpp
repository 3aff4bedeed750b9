#include "ecoforge/version.hpp"

#include <cctype>
#include <tuple>

#include "ecoforge/errors.hpp"

namespace ecoforge {

bool Version::operator<(const Version& other) const {
    const auto lhs = std::tie(major, minor, patch);
    const auto rhs = std::tie(other.major, other.minor, other.patch);
    if (lhs != rhs)
        return lhs < rhs;
    // Same triple: a prerelease sorts below the bare version; two
    // prereleases compare as opaque tokens.
    if (prerelease.empty())
        return false;
    if (other.prerelease.empty())
        return true;
    return prerelease < other.prerelease;
}

std::string Version::str() const {
    std::string out = std::to_string(major) + "." + std::to_string(minor) + "." +
                      std::to_string(patch);
    if (!prerelease.empty())
        out += "-" + prerelease;
    return out;
}

namespace {

[[noreturn]] void fail(std::string_view text, const std::string& why) {
    throw Error(ErrorKind::malformed_version,
                "malformed version \"" + std::string(text) + "\": " + why);
}

// Consumes a decimal component; rejects empty and non-digit input.
int take_number(std::string_view text, std::string_view& rest) {
    size_t n = 0;
    while (n < rest.size() && std::isdigit(static_cast<unsigned char>(rest[n])))
        ++n;
    if (n == 0)
        fail(text, "expected a non-negative number");
    if (n > 9)
        fail(text, "component too large");
    int value = 0;
    for (size_t i = 0; i < n; ++i)
        value = value * 10 + (rest[i] - '0');
    rest.remove_prefix(n);
    return value;
}

void take_dot(std::string_view text, std::string_view& rest) {
    if (rest.empty() || rest.front() != '.')
        fail(text, "expected \".\" separator");
    rest.remove_prefix(1);
}

} // namespace

Version parse_version(std::string_view text) {
    std::string_view rest = text;
    Version v;
    v.major = take_number(text, rest);
    take_dot(text, rest);
    v.minor = take_number(text, rest);
    take_dot(text, rest);
    v.patch = take_number(text, rest);
    if (!rest.empty()) {
        if (rest.front() != '-')
            fail(text, "unexpected trailing characters");
        rest.remove_prefix(1);
        if (rest.empty())
            fail(text, "empty prerelease token");
        for (char c : rest) {
            if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.')
                fail(text, "illegal character in prerelease token");
        }
        v.prerelease = std::string(rest);
    }
    return v;
}

} // namespace ecoforge
