#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gpc {

enum class Errc {
    NonPrimeDimension,
    DimensionTooSmall,
    DimensionMismatch,
    NotNormalized,
    InvalidArgument,
    NegativeTime,
    DegenerateDenominator,
    PreconditionUnmet,
    EmptyGrid,
    OutOfBranchDomain,
    InvalidK,
    UnsupportedDimension,
    SingularIntermediateMap,
    NegativeWeightDerivative,
    StepSizeUnderflow,
};

constexpr std::string_view to_string(Errc code) noexcept {
    switch (code) {
    case Errc::NonPrimeDimension: return "NonPrimeDimension";
    case Errc::DimensionTooSmall: return "DimensionTooSmall";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NotNormalized: return "NotNormalized";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::NegativeTime: return "NegativeTime";
    case Errc::DegenerateDenominator: return "DegenerateDenominator";
    case Errc::PreconditionUnmet: return "PreconditionUnmet";
    case Errc::EmptyGrid: return "EmptyGrid";
    case Errc::OutOfBranchDomain: return "OutOfBranchDomain";
    case Errc::InvalidK: return "InvalidK";
    case Errc::UnsupportedDimension: return "UnsupportedDimension";
    case Errc::SingularIntermediateMap: return "SingularIntermediateMap";
    case Errc::NegativeWeightDerivative: return "NegativeWeightDerivative";
    case Errc::StepSizeUnderflow: return "StepSizeUnderflow";
    }
    return "Unknown";
}

// All library failures are reported through this type; `code()` identifies
// the violated contract, `what()` carries the offending value.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace gpc
