#pragma once

#include <stdexcept>
#include <string>

namespace stlens {

enum class ErrorCode {
    InvalidArgument = 1,
    Io,
    Parse,
    DataGap,
    DuplicateMonth,
    InsufficientData,
    DimensionMismatch,
    Degenerate,
    Convergence,
    Internal,
};

const char* error_code_name(ErrorCode code) noexcept;

// Every failure raised by the library carries a machine-readable code; the
// C API maps it one-to-one onto stlens_status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
    if (!condition) {
        throw Error(code, message);
    }
}

} // namespace stlens
