#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bayesmerton {

enum class ErrorCode {
    NonPositiveSigma,
    EmptySupport,
    UnorderedDrifts,
    InvalidPrior,
    InvalidAlpha,
    InvalidQuery,
    InvalidArgument,
    InvalidConfig,
    DegenerateHorizon,
    HypothesisViolated,
    InvalidLambda,
    QuadratureNotConverged,
    StepTooLarge,
};

constexpr std::string_view error_name(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::NonPositiveSigma: return "NonPositiveSigma";
    case ErrorCode::EmptySupport: return "EmptySupport";
    case ErrorCode::UnorderedDrifts: return "UnorderedDrifts";
    case ErrorCode::InvalidPrior: return "InvalidPrior";
    case ErrorCode::InvalidAlpha: return "InvalidAlpha";
    case ErrorCode::InvalidQuery: return "InvalidQuery";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::DegenerateHorizon: return "DegenerateHorizon";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::InvalidLambda: return "InvalidLambda";
    case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    }
    return "Unknown";
}

/// True for failures of a numerical method on otherwise valid input.
constexpr bool is_numerical(ErrorCode code) noexcept {
    return code == ErrorCode::QuadratureNotConverged || code == ErrorCode::StepTooLarge;
}

/// Library exception. The message is prefixed with the error name so a
/// plain `what()` already identifies the violated condition.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(error_name(code)) + ": " + detail), code_(code) {}

    ErrorCode code() const noexcept { return code_; }
    std::string_view name() const noexcept { return error_name(code_); }

private:
    ErrorCode code_;
};

}  // namespace bayesmerton
