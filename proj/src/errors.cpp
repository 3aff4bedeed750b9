#include "ecoforge/errors.hpp"

namespace ecoforge {

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::malformed_version: return "malformed-version";
    case ErrorKind::malformed_constraint: return "malformed-constraint";
    case ErrorKind::parse_error: return "parse-error";
    case ErrorKind::schema_error: return "schema-error";
    case ErrorKind::invariant_error: return "invariant-error";
    case ErrorKind::io_error: return "io-error";
    case ErrorKind::duplicate_entry: return "duplicate-entry";
    case ErrorKind::unknown_package: return "unknown-package";
    case ErrorKind::cycle_error: return "cycle-error";
    case ErrorKind::template_error: return "template-error";
    case ErrorKind::version_regression: return "version-regression";
    case ErrorKind::empty_plan: return "empty-plan";
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::execution_error: return "execution-error";
    }
    return "error";
}

} // namespace ecoforge
