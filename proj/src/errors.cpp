#include "cryptodyn/errors.hpp"

namespace cryptodyn {

std::string_view error_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::DefectiveMatrix: return "DefectiveMatrix";
        case ErrorCode::SingularMatrix: return "SingularMatrix";
        case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorCode::InvalidWeights: return "InvalidWeights";
        case ErrorCode::PositivityFailure: return "PositivityFailure";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::DegenerateOverlap: return "DegenerateOverlap";
        case ErrorCode::NotHermitian: return "NotHermitian";
        case ErrorCode::NonFiniteState: return "NonFiniteState";
        case ErrorCode::ExpectsRealSpectrum: return "ExpectsRealSpectrum";
        case ErrorCode::ResampleExhausted: return "ResampleExhausted";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "UnknownError";
}

}  // namespace cryptodyn
