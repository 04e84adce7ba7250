#pragma once

#include <stdexcept>
#include <string>

namespace plap {

struct InvalidInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidField : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyGrid : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SegmentCalibrationFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DisjointnessViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GapViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientDecayData : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EigenIterationFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DivisionByZero : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Config parse/validation failure, carries a 1-based line number (0 = n/a).
struct ConfigError : std::runtime_error {
    int line;
    ConfigError(const std::string& msg, int line_ = 0)
        : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + ": " + msg : msg),
          line(line_) {}
};

} // namespace plap
