#pragma once

#include <stdexcept>
#include <string>

namespace tracegist {

enum class ErrorKind {
    Parse,        // malformed input file
    Schema,       // inconsistent columns / keys
    TooShort,     // fewer than two observations
    Argument,     // out-of-range parameter
    Config,       // invalid learner configuration
    Overflow,     // integer overflow while evaluating
    Timeout,      // solver resource limit
    NMaxExceeded, // learner exhausted its state budget
    Io,
    Internal,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg, long line = 0)
        : std::runtime_error(msg), kind_(kind), line_(line) {}

    ErrorKind kind() const noexcept { return kind_; }
    // 1-based input line for parse errors, 0 otherwise.
    long line() const noexcept { return line_; }

private:
    ErrorKind kind_;
    long line_;
};

} // namespace tracegist
