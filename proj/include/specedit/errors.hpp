#pragma once

#include <stdexcept>
#include <string>

namespace specedit {

enum class ErrorCode {
    NonDivisibleShape,
    ShapeMismatch,
    GridMismatch,
    StepOutOfRange,
    BadMagic,
    UnsupportedVersion,
    UnsupportedFormat,
    MalformedHeader,
    TruncatedPayload,
    NonFiniteValue,
    UnnormalizedMap,
    ChannelCountTooSmall,
    IncompleteLedger,
    GeneratorRetryExhausted,
    EmptyAxis,
    InvalidArgument,
    ConfigError,
    IoError,
};

const char* error_code_name(ErrorCode code);

// True for the codes the CLI reports as shape errors (exit 3).
bool is_shape_error(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace specedit
