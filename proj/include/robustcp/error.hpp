#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace robustcp {

// Machine-readable error categories. The CLI prints the category name and
// maps it to a nonzero exit code.
enum class ErrorCode {
    EmptySample,
    InsufficientLength,
    NonFiniteValue,
    DegenerateScale,
    WindowTooSmall,
    InvalidParameter,
    ZeroTotalSumOfSquares,
    InvalidAlpha,
    InvalidGamma,
    IndexOutOfRange,
    EmptyInput,
    ConfigError,
    FileNotFound,
    ParseError,
    EmptyColumn,
    NonPositiveForLog,
    TooShortAfterPreprocess,
    IoError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::InsufficientLength: return "InsufficientLength";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::DegenerateScale: return "DegenerateScale";
    case ErrorCode::WindowTooSmall: return "WindowTooSmall";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::ZeroTotalSumOfSquares: return "ZeroTotalSumOfSquares";
    case ErrorCode::InvalidAlpha: return "InvalidAlpha";
    case ErrorCode::InvalidGamma: return "InvalidGamma";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyColumn: return "EmptyColumn";
    case ErrorCode::NonPositiveForLog: return "NonPositiveForLog";
    case ErrorCode::TooShortAfterPreprocess: return "TooShortAfterPreprocess";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace robustcp
