#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mpqkd {

// Precondition failure on a caller-supplied value.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Caller broke an API contract (e.g. removing an edge that is not alive).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Dense state or terminal count exceeds what the quantum model supports.
class CapacityError : public std::length_error {
public:
    using std::length_error::length_error;
};

// Randomized construction gave up after its retry budget.
class GenerationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Configuration problem. `where` is either "line N" or a dotted key path.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string where, const std::string& what)
        : std::runtime_error(where + ": " + what), where_(std::move(where)) {}

    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace mpqkd
