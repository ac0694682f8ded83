#include "specedit/errors.hpp"

namespace specedit {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonDivisibleShape: return "NonDivisibleShape";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::GridMismatch: return "GridMismatch";
        case ErrorCode::StepOutOfRange: return "StepOutOfRange";
        case ErrorCode::BadMagic: return "BadMagic";
        case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
        case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
        case ErrorCode::MalformedHeader: return "MalformedHeader";
        case ErrorCode::TruncatedPayload: return "TruncatedPayload";
        case ErrorCode::NonFiniteValue: return "NonFiniteValue";
        case ErrorCode::UnnormalizedMap: return "UnnormalizedMap";
        case ErrorCode::ChannelCountTooSmall: return "ChannelCountTooSmall";
        case ErrorCode::IncompleteLedger: return "IncompleteLedger";
        case ErrorCode::GeneratorRetryExhausted: return "GeneratorRetryExhausted";
        case ErrorCode::EmptyAxis: return "EmptyAxis";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

bool is_shape_error(ErrorCode code) {
    return code == ErrorCode::NonDivisibleShape || code == ErrorCode::ShapeMismatch ||
           code == ErrorCode::GridMismatch;
}

}  // namespace specedit
