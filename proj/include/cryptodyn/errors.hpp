#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cryptodyn {

enum class ErrorCode {
    DefectiveMatrix,
    SingularMatrix,
    NotPositiveDefinite,
    InvalidWeights,
    PositivityFailure,
    DimensionMismatch,
    DegenerateOverlap,
    NotHermitian,
    NonFiniteState,
    ExpectsRealSpectrum,
    ResampleExhausted,
    InvalidArgument,
};

std::string_view error_name(ErrorCode code) noexcept;

// Every numerical failure raised by the library. The code is the stable
// identifier reported by the CLI on the diagnostic stream.
class NumericError : public std::runtime_error {
public:
    NumericError(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }
    std::string_view name() const noexcept { return error_name(code_); }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw NumericError(code, what);
}

}  // namespace cryptodyn
