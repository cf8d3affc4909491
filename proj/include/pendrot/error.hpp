#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pendrot {

enum class ErrorCode {
    InvalidParams,
    PoleAtOne,
    PoleAtOneOverR,
    OutOfDomain,
    QuadratureNotConverged,
    TangencyDegenerate,
    UnreachableBranch,
    SingularCrest,
    OnDiscontinuity,
    StepFailure,
    WindowEmpty,
    StuckAtResonance,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; the code tells callers which
/// recovery applies (switch parameterization, mask the point, abort the run).
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace pendrot
