#include "dualcox/error.hpp"

namespace dualcox {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonPositiveTime: return "NonPositiveTime";
        case ErrorCode::MissingResponseOnLabeled: return "MissingResponseOnLabeled";
        case ErrorCode::ResponsePresentOnUnlabeled: return "ResponsePresentOnUnlabeled";
        case ErrorCode::NonFiniteCovariate: return "NonFiniteCovariate";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NoEvents: return "NoEvents";
        case ErrorCode::AllWeightsZero: return "AllWeightsZero";
        case ErrorCode::EmptyRiskSet: return "EmptyRiskSet";
        case ErrorCode::SingularHessian: return "SingularHessian";
        case ErrorCode::EmptyLabeledComponent: return "EmptyLabeledComponent";
        case ErrorCode::ComponentCollapsed: return "ComponentCollapsed";
        case ErrorCode::BisectionFailed: return "BisectionFailed";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::EmptySurvivorSet: return "EmptySurvivorSet";
        case ErrorCode::InvalidInput: return "InvalidInput";
    }
    return "UnknownError";
}

}  // namespace dualcox
