#pragma once

#include <stdexcept>
#include <string>

namespace ecoforge {

enum class ErrorKind {
    malformed_version,
    malformed_constraint,
    parse_error,
    schema_error,
    invariant_error,
    io_error,
    duplicate_entry,
    unknown_package,
    cycle_error,
    template_error,
    version_regression,
    empty_plan,
    invalid_input,
    execution_error,
};

const char* error_kind_name(ErrorKind kind);

/// Single exception type for all domain errors; the kind drives CLI exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

/// A named rule violation. Violations are data, not failures: validators
/// return lists of these instead of throwing.
struct Violation {
    std::string subject; // field, component, or file the rule applies to
    std::string rule;    // which rule is broken, human readable

    std::string str() const { return subject + ": " + rule; }

    bool operator==(const Violation&) const = default;
};

} // namespace ecoforge
