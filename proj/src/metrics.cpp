#include "dualcox/metrics.hpp"

#include "dualcox/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace dualcox {

double classification_accuracy(std::span<const int> predicted, std::span<const int> truth) {
    if (predicted.size() != truth.size()) {
        throw Error(ErrorCode::DimensionMismatch, "label vectors differ in length");
    }
    if (predicted.empty()) {
        throw Error(ErrorCode::EmptyInput, "no labels to score");
    }
    std::size_t matches = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) matches += (predicted[i] == truth[i]);
    return static_cast<double>(matches) / static_cast<double>(predicted.size());
}

BiasStats bias_stats(std::span<const double> estimates, double truth) {
    if (estimates.size() < 2) {
        throw Error(ErrorCode::EmptyInput, "need at least 2 estimates");
    }
    BiasStats stats;
    double sum = 0.0;
    for (double v : estimates) sum += v;
    stats.mean = sum / static_cast<double>(estimates.size());
    double ss = 0.0;
    for (double v : estimates) ss += (v - stats.mean) * (v - stats.mean);
    stats.sd = std::sqrt(ss / static_cast<double>(estimates.size() - 1));
    stats.bias = stats.mean - truth;
    if (truth != 0.0) {
        stats.relative_bias = stats.bias / truth;
    } else {
        stats.relative_bias = 0.0;
        stats.relative_bias_defined = false;
    }
    return stats;
}

double incident_sensitivity(double threshold, double t, std::span<const double> markers,
                            std::span<const double> times,
                            std::span<const double> linear_predictors) {
    if (markers.size() != times.size() || markers.size() != linear_predictors.size()) {
        throw Error(ErrorCode::DimensionMismatch, "marker/time/predictor lengths differ");
    }
    // Shift the predictors so the exp weights stay in range.
    double shift = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] >= t) shift = std::max(shift, linear_predictors[i]);
    }
    if (!std::isfinite(shift)) {
        throw Error(ErrorCode::EmptyRiskSet, "no subject at risk at the requested time");
    }
    double numerator = 0.0;
    double denominator = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t) continue;
        const double w = std::exp(linear_predictors[i] - shift);
        denominator += w;
        if (markers[i] > threshold) numerator += w;
    }
    return numerator / denominator;
}

double dynamic_specificity(double threshold, double t, std::span<const double> markers,
                           std::span<const double> times) {
    if (markers.size() != times.size()) {
        throw Error(ErrorCode::DimensionMismatch, "marker/time lengths differ");
    }
    std::size_t survivors = 0;
    std::size_t above = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] > t) {
            ++survivors;
            if (markers[i] > threshold) ++above;
        }
    }
    if (survivors == 0) {
        throw Error(ErrorCode::EmptySurvivorSet, "no survivor past the requested time");
    }
    return 1.0 - static_cast<double>(above) / static_cast<double>(survivors);
}

RocCurveAtTime roc_at_time(double t, std::span<const double> times,
                           std::span<const double> linear_predictors) {
    bool any_at_risk = false;
    bool any_survivor = false;
    for (double y : times) {
        any_at_risk |= (y >= t);
        any_survivor |= (y > t);
    }
    if (!any_at_risk) throw Error(ErrorCode::EmptyRiskSet, "no subject at risk at the requested time");
    if (!any_survivor) throw Error(ErrorCode::EmptySurvivorSet, "no survivor past the requested time");

    // Thresholds sweep the distinct observed marker values (the markers are
    // the linear predictors) with +-inf sentinels pinning the endpoints.
    const double inf = std::numeric_limits<double>::infinity();
    std::set<double, std::greater<double>> distinct(linear_predictors.begin(),
                                                    linear_predictors.end());
    RocCurveAtTime curve;
    curve.t = t;
    curve.thresholds.push_back(inf);
    for (double c : distinct) curve.thresholds.push_back(c);
    curve.thresholds.push_back(-inf);

    for (double c : curve.thresholds) {
        const double se = std::isinf(c) ? (c > 0 ? 0.0 : 1.0)
                                        : incident_sensitivity(c, t, linear_predictors, times,
                                                               linear_predictors);
        const double sp = std::isinf(c) ? (c > 0 ? 1.0 : 0.0)
                                        : dynamic_specificity(c, t, linear_predictors, times);
        curve.sensitivity.push_back(se);
        curve.one_minus_specificity.push_back(1.0 - sp);
    }

    double auc = 0.0;
    for (std::size_t i = 1; i < curve.thresholds.size(); ++i) {
        const double dx = curve.one_minus_specificity[i] - curve.one_minus_specificity[i - 1];
        auc += dx * 0.5 * (curve.sensitivity[i] + curve.sensitivity[i - 1]);
    }
    curve.auc = auc;
    return curve;
}

AucOverTimes auc_over_times(std::span<const double> time_grid, std::span<const double> times,
                            std::span<const double> linear_predictors) {
    AucOverTimes result;
    for (double t : time_grid) {
        bool any_at_risk = false;
        bool any_survivor = false;
        for (double y : times) {
            any_at_risk |= (y >= t);
            any_survivor |= (y > t);
        }
        if (!any_at_risk || !any_survivor) {
            result.omitted_times.push_back(t);
            continue;
        }
        result.points.push_back({t, roc_at_time(t, times, linear_predictors).auc});
    }
    return result;
}

}  // namespace dualcox
