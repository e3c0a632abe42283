#pragma once

#include <stdexcept>
#include <string>

namespace sinesteer {

enum class ErrorCode {
    // usage
    UsageError,
    // data / validation
    AngleOutOfRange,
    InvalidDistribution,
    InvalidCutoff,
    InvalidInput,
    FrameOutsideLog,
    InvalidRate,
    LengthMismatch,
    SeriesTooShort,
    InvalidParams,
    RowCountMismatch,
    MalformedFile,
    NotEnoughSessions,
    ShapeMismatch,
    HeadCodecMismatch,
    IoError,
    // numeric
    DegenerateWave,
    PhaseOutOfRange,
    InvalidEpsilon,
    NonfiniteLoss,
};

const char* error_name(ErrorCode code);

/// CLI exit-code class: 1 usage, 2 data, 3 numeric.
int exit_class(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace sinesteer
