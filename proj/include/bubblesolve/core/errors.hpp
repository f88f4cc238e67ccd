#pragma once

#include <stdexcept>
#include <string>

namespace bubblesolve {

// Failure categories reported by solvers, models and the CLI front end.
// The CLI maps them to process exit codes: config errors -> 2, solver
// errors -> 3, verification failures -> 4.
enum class ErrorCode {
    ConfigInvalid,
    UnknownModel,
    ShapeMismatch,
    NoConvergence,
    SingularJacobian,
    NonFiniteEvaluation,
    NoSignChange,
    NonFiniteSaving,
    PreconditionFailed,
    NotDeterminate,
    ShootingFailed,
    InverseUndefined,
    NoRoot,
    FocSolveFailed,
    InfeasiblePortfolio,
    NotConvergent,
    InvalidInitialPrice,
    OrderViolation,
    DegenerateConsumption,
    DegenerateWage,
    NoBubblyEquilibrium,
    VerificationFailed,
};

constexpr const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::ConfigInvalid: return "ConfigInvalid";
        case ErrorCode::UnknownModel: return "UnknownModel";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::SingularJacobian: return "SingularJacobian";
        case ErrorCode::NonFiniteEvaluation: return "NonFiniteEvaluation";
        case ErrorCode::NoSignChange: return "NoSignChange";
        case ErrorCode::NonFiniteSaving: return "NonFiniteSaving";
        case ErrorCode::PreconditionFailed: return "PreconditionFailed";
        case ErrorCode::NotDeterminate: return "NotDeterminate";
        case ErrorCode::ShootingFailed: return "ShootingFailed";
        case ErrorCode::InverseUndefined: return "InverseUndefined";
        case ErrorCode::NoRoot: return "NoRoot";
        case ErrorCode::FocSolveFailed: return "FocSolveFailed";
        case ErrorCode::InfeasiblePortfolio: return "InfeasiblePortfolio";
        case ErrorCode::NotConvergent: return "NotConvergent";
        case ErrorCode::InvalidInitialPrice: return "InvalidInitialPrice";
        case ErrorCode::OrderViolation: return "OrderViolation";
        case ErrorCode::DegenerateConsumption: return "DegenerateConsumption";
        case ErrorCode::DegenerateWage: return "DegenerateWage";
        case ErrorCode::NoBubblyEquilibrium: return "NoBubblyEquilibrium";
        case ErrorCode::VerificationFailed: return "VerificationFailed";
    }
    return "Unknown";
}

class ToolkitError : public std::runtime_error {
  public:
    ToolkitError(ErrorCode code, const std::string& what_arg)
        : std::runtime_error(std::string(to_string(code)) + ": " + what_arg), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

// Exit status used by the command-line tool.
constexpr int exit_status(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::ConfigInvalid:
        case ErrorCode::UnknownModel:
        case ErrorCode::ShapeMismatch:
            return 2;
        case ErrorCode::VerificationFailed:
            return 4;
        default:
            return 3;
    }
}

}  // namespace bubblesolve
