#pragma once

#include <stdexcept>
#include <string>

namespace cradon {

/// Base class of all library errors. The three direct subclasses map onto
/// the CLI exit codes: config_error -> 1, numerics_error -> 2, io_error -> 3.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct config_error : error {
    using error::error;
};

struct numerics_error : error {
    using error::error;
};

struct io_error : error {
    using error::error;
};

// Validation failures (exit code 1).
struct invalid_input_error : config_error {
    using config_error::config_error;
};
struct resolution_error : config_error {
    using config_error::config_error;
};

// Failures of a numerically meaningful operation on valid inputs (exit code 2).
struct on_curve_error : numerics_error {
    using numerics_error::numerics_error;
};
struct not_mirrorable_error : numerics_error {
    using numerics_error::numerics_error;
};
struct tangency_error : numerics_error {
    using numerics_error::numerics_error;
};
struct domain_error : numerics_error {
    using numerics_error::numerics_error;
};
struct singular_frequency_error : numerics_error {
    using numerics_error::numerics_error;
};
struct fit_error : numerics_error {
    using numerics_error::numerics_error;
};
struct ellipticity_violation_error : numerics_error {
    using numerics_error::numerics_error;
};
struct not_applicable_error : numerics_error {
    using numerics_error::numerics_error;
};

} // namespace cradon
