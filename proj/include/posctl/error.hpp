#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace posctl {

enum class ErrorCode {
    DimensionMismatch,
    NonHurwitz,
    NumericalBreakdown,
    AssumptionViolation,
    LpFailure,
    Singular,
    Infeasible,
    MaxAlternations,
    LineSearchStall,
    Diverged,
    TooLarge,
    RegimeUnsupported,
    TargetUnreachable,
    ParseError,
    InvalidArgument,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this exception type; the code
// lets callers (and the CLI exit-code mapping) branch without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonHurwitz: return "NonHurwitz";
    case ErrorCode::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorCode::AssumptionViolation: return "AssumptionViolation";
    case ErrorCode::LpFailure: return "LpFailure";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::MaxAlternations: return "MaxAlternations";
    case ErrorCode::LineSearchStall: return "LineSearchStall";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::RegimeUnsupported: return "RegimeUnsupported";
    case ErrorCode::TargetUnreachable: return "TargetUnreachable";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

}  // namespace posctl
