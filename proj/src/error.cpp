#include "pendrot/error.hpp"

namespace pendrot {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidParams: return "InvalidParams";
        case ErrorCode::PoleAtOne: return "PoleAtOne";
        case ErrorCode::PoleAtOneOverR: return "PoleAtOneOverR";
        case ErrorCode::OutOfDomain: return "OutOfDomain";
        case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
        case ErrorCode::TangencyDegenerate: return "TangencyDegenerate";
        case ErrorCode::UnreachableBranch: return "UnreachableBranch";
        case ErrorCode::SingularCrest: return "SingularCrest";
        case ErrorCode::OnDiscontinuity: return "OnDiscontinuity";
        case ErrorCode::StepFailure: return "StepFailure";
        case ErrorCode::WindowEmpty: return "WindowEmpty";
        case ErrorCode::StuckAtResonance: return "StuckAtResonance";
    }
    return "Unknown";
}

}  // namespace pendrot
