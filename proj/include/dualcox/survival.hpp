#pragma once

#include "dualcox/step_function.hpp"

#include <span>

namespace dualcox {

// Kaplan-Meier product-limit estimator. Knots sit at the distinct event
// times; tied events are aggregated. The curve starts at 1 before the
// first event and is non-increasing.
StepFunction kaplan_meier(std::span<const double> times, std::span<const int> statuses);

struct LogrankResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

// Two-sample Mantel-Haenszel log-rank test with a chi-square(1) reference
// distribution. Each group must contribute at least one event.
LogrankResult logrank_test(std::span<const double> times_a, std::span<const int> statuses_a,
                           std::span<const double> times_b, std::span<const int> statuses_b);

// Upper tail of the chi-square distribution with 1 df.
double chisq1_upper_tail(double statistic);

}  // namespace dualcox
