#include "stlens/error.hpp"

namespace stlens {

const char* error_code_name(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::Io: return "IO";
    case ErrorCode::Parse: return "PARSE";
    case ErrorCode::DataGap: return "DATA_GAP";
    case ErrorCode::DuplicateMonth: return "DUPLICATE_MONTH";
    case ErrorCode::InsufficientData: return "INSUFFICIENT_DATA";
    case ErrorCode::DimensionMismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::Degenerate: return "DEGENERATE";
    case ErrorCode::Convergence: return "CONVERGENCE";
    case ErrorCode::Internal: return "INTERNAL";
    }
    return "UNKNOWN";
}

} // namespace stlens
