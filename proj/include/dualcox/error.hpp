#pragma once

#include <stdexcept>
#include <string>

namespace dualcox {

enum class ErrorCode {
    // data validation
    NonPositiveTime,
    MissingResponseOnLabeled,
    ResponsePresentOnUnlabeled,
    NonFiniteCovariate,
    DimensionMismatch,
    // survival estimation
    NoEvents,
    // weighted Cox
    AllWeightsZero,
    EmptyRiskSet,
    SingularHessian,
    // EM
    EmptyLabeledComponent,
    ComponentCollapsed,
    // simulation
    BisectionFailed,
    // metrics
    EmptyInput,
    EmptySurvivorSet,
    // I/O
    InvalidInput,
};

const char* error_code_name(ErrorCode code);

// Single exception type carrying a machine-checkable code plus a
// human-readable message (often with a row/line number).
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

}  // namespace dualcox
