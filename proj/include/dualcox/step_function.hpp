#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace dualcox {

// Right-continuous step function over a strictly increasing knot grid.
// Carrier for Kaplan-Meier curves, Breslow hazard increments, and
// cumulative baseline hazards.
class StepFunction {
  public:
    StepFunction() = default;
    StepFunction(std::vector<double> knots, std::vector<double> values, double value_before_first);

    // Value of the last knot <= t, or value_before_first when t precedes
    // every knot.
    double operator()(double t) const;

    // Index of the knot exactly equal to t, if any. Hazard increments are
    // defined only at knots, so lookups must be exact.
    std::optional<std::size_t> knot_index(double t) const;

    const std::vector<double>& knots() const { return knots_; }
    const std::vector<double>& values() const { return values_; }
    double value_before_first() const { return value_before_first_; }
    std::size_t size() const { return knots_.size(); }

  private:
    std::vector<double> knots_;
    std::vector<double> values_;
    double value_before_first_ = 0.0;
};

}  // namespace dualcox
