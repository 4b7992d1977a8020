#pragma once

#include <stdexcept>
#include <string>

namespace txnforge {

// Error taxonomy used across the library. The CLI maps these onto exit
// codes: ParamError / ConfigError / DataError / UnsupportedError -> 2,
// IoError -> 3.

/// Invalid argument to a library operation (bad sigma, out-of-range hour, ...).
struct ParamError : std::invalid_argument {
    explicit ParamError(const std::string& what) : std::invalid_argument(what) {}
};

/// Invalid model configuration detected at load time.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or missing input data (artifact files, feature matrices).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Operation not defined for the given input (e.g. DOT export of a run
/// without receivers).
struct UnsupportedError : std::runtime_error {
    explicit UnsupportedError(const std::string& what) : std::runtime_error(what) {}
};

/// Failure writing an artifact; message carries the path.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace txnforge
