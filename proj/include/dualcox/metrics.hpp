#pragma once

#include <optional>
#include <span>
#include <vector>

namespace dualcox {

// Fraction of exact label matches.
double classification_accuracy(std::span<const int> predicted, std::span<const int> truth);

struct BiasStats {
    double mean = 0.0;
    double sd = 0.0;    // n-1 denominator
    double bias = 0.0;  // mean - truth
    double relative_bias = 0.0;
    bool relative_bias_defined = true;  // false when truth == 0
};

BiasStats bias_stats(std::span<const double> estimates, double truth);

// Incident sensitivity under proportional hazards (Heagerty & Zheng 2005):
//   Se(c,t) = sum_{i in R(t)} 1(M_i > c) exp(lp_i) / sum_{i in R(t)} exp(lp_i),
// with risk set R(t) = {i : Y_i >= t}.
double incident_sensitivity(double threshold, double t, std::span<const double> markers,
                            std::span<const double> times,
                            std::span<const double> linear_predictors);

// Dynamic specificity: Sp(c,t) = 1 - (1/n_t) sum_{i in S(t)} 1(M_i > c),
// with survivor set S(t) = {i : Y_i > t}.
double dynamic_specificity(double threshold, double t, std::span<const double> markers,
                           std::span<const double> times);

struct RocCurveAtTime {
    double t = 0.0;
    std::vector<double> thresholds;            // descending, with +-inf sentinels
    std::vector<double> sensitivity;           // incident
    std::vector<double> one_minus_specificity; // dynamic
    double auc = 0.0;                          // trapezoid over the stored curve
};

// Sweeps the threshold over the distinct marker values (markers are the
// linear predictors under the Cox model) and integrates by trapezoid.
RocCurveAtTime roc_at_time(double t, std::span<const double> times,
                           std::span<const double> linear_predictors);

struct AucPoint {
    double t = 0.0;
    double auc = 0.0;
};

struct AucOverTimes {
    std::vector<AucPoint> points;
    std::vector<double> omitted_times;  // grid points with an empty risk or survivor set
};

AucOverTimes auc_over_times(std::span<const double> time_grid, std::span<const double> times,
                            std::span<const double> linear_predictors);

}  // namespace dualcox
