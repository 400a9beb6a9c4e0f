#pragma once

#include <stdexcept>
#include <string>

namespace xmodal {

// Error taxonomy mirrored by the CLI exit codes: usage/config -> 1,
// missing prerequisite artifact -> 2, numeric fault -> 3.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionError : UsageError {
    using UsageError::UsageError;
};

struct DependencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericFault : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace xmodal
