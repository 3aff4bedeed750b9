#pragma once

#include <string>
#include <string_view>

namespace ecoforge {

/// Three-part version with an optional prerelease token.
///
/// Ordering is total: lexicographic on (major, minor, patch), and a
/// prerelease version sorts strictly below the same version without one.
/// Prerelease tokens compare against each other as opaque strings.
struct Version {
    int major = 0;
    int minor = 0;
    int patch = 0;
    std::string prerelease; // empty means "no prerelease"

    bool operator==(const Version&) const = default;
    bool operator<(const Version& other) const;
    bool operator>(const Version& other) const { return other < *this; }
    bool operator<=(const Version& other) const { return !(other < *this); }
    bool operator>=(const Version& other) const { return !(*this < other); }

    /// Canonical text form: "major.minor.patch" or "major.minor.patch-prerelease".
    std::string str() const;
};

/// Parses the canonical text form. Throws Error{malformed_version} on
/// missing components, negative numbers, or illegal characters.
Version parse_version(std::string_view text);

} // namespace ecoforge
