#include "dualcox/step_function.hpp"

#include "dualcox/error.hpp"

#include <algorithm>

namespace dualcox {

StepFunction::StepFunction(std::vector<double> knots, std::vector<double> values,
                           double value_before_first)
    : knots_(std::move(knots)), values_(std::move(values)), value_before_first_(value_before_first) {
    if (knots_.size() != values_.size()) {
        throw Error(ErrorCode::DimensionMismatch, "step function knots and values differ in length");
    }
    for (std::size_t i = 1; i < knots_.size(); ++i) {
        if (!(knots_[i] > knots_[i - 1])) {
            throw Error(ErrorCode::InvalidInput, "step function knots must be strictly increasing");
        }
    }
}

double StepFunction::operator()(double t) const {
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    if (it == knots_.begin()) return value_before_first_;
    return values_[static_cast<std::size_t>(it - knots_.begin()) - 1];
}

std::optional<std::size_t> StepFunction::knot_index(double t) const {
    auto it = std::lower_bound(knots_.begin(), knots_.end(), t);
    if (it == knots_.end() || *it != t) return std::nullopt;
    return static_cast<std::size_t>(it - knots_.begin());
}

}  // namespace dualcox
