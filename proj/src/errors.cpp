#include "sinesteer/errors.hpp"

namespace sinesteer {

const char* error_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::UsageError: return "UsageError";
        case ErrorCode::AngleOutOfRange: return "AngleOutOfRange";
        case ErrorCode::InvalidDistribution: return "InvalidDistribution";
        case ErrorCode::InvalidCutoff: return "InvalidCutoff";
        case ErrorCode::InvalidInput: return "InvalidInput";
        case ErrorCode::FrameOutsideLog: return "FrameOutsideLog";
        case ErrorCode::InvalidRate: return "InvalidRate";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::SeriesTooShort: return "SeriesTooShort";
        case ErrorCode::InvalidParams: return "InvalidParams";
        case ErrorCode::RowCountMismatch: return "RowCountMismatch";
        case ErrorCode::MalformedFile: return "MalformedFile";
        case ErrorCode::NotEnoughSessions: return "NotEnoughSessions";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::HeadCodecMismatch: return "HeadCodecMismatch";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::DegenerateWave: return "DegenerateWave";
        case ErrorCode::PhaseOutOfRange: return "PhaseOutOfRange";
        case ErrorCode::InvalidEpsilon: return "InvalidEpsilon";
        case ErrorCode::NonfiniteLoss: return "NonfiniteLoss";
    }
    return "UnknownError";
}

int exit_class(ErrorCode code) {
    switch (code) {
        case ErrorCode::UsageError:
            return 1;
        case ErrorCode::DegenerateWave:
        case ErrorCode::PhaseOutOfRange:
        case ErrorCode::InvalidEpsilon:
        case ErrorCode::NonfiniteLoss:
            return 3;
        default:
            return 2;
    }
}

}  // namespace sinesteer
