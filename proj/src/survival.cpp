#include "dualcox/survival.hpp"

#include "dualcox/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

namespace dualcox {

namespace {

struct TimeCounts {
    int events = 0;
    int total = 0;  // events + censorings at this time
};

// Aggregate per distinct time; map keeps times sorted.
std::map<double, TimeCounts> aggregate(std::span<const double> times, std::span<const int> statuses) {
    if (times.size() != statuses.size()) {
        throw Error(ErrorCode::DimensionMismatch, "times and statuses differ in length");
    }
    std::map<double, TimeCounts> counts;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] > 0.0) || !std::isfinite(times[i])) {
            throw Error(ErrorCode::NonPositiveTime, "times must be positive and finite");
        }
        if (statuses[i] != 0 && statuses[i] != 1) {
            throw Error(ErrorCode::InvalidInput, "statuses must be 0 or 1");
        }
        TimeCounts& c = counts[times[i]];
        c.events += statuses[i];
        c.total += 1;
    }
    return counts;
}

}  // namespace

StepFunction kaplan_meier(std::span<const double> times, std::span<const int> statuses) {
    const auto counts = aggregate(times, statuses);

    std::vector<double> knots;
    std::vector<double> values;
    double survival = 1.0;
    int at_risk = static_cast<int>(times.size());
    for (const auto& [t, c] : counts) {
        if (c.events > 0) {
            survival *= 1.0 - static_cast<double>(c.events) / at_risk;
            knots.push_back(t);
            values.push_back(survival);
        }
        at_risk -= c.total;
    }
    if (knots.empty()) {
        throw Error(ErrorCode::NoEvents, "all observations censored");
    }
    return StepFunction(std::move(knots), std::move(values), 1.0);
}

double chisq1_upper_tail(double statistic) {
    if (statistic <= 0.0) return 1.0;
    // chi-square(1) survival function via the normal tail.
    return std::erfc(std::sqrt(statistic / 2.0));
}

LogrankResult logrank_test(std::span<const double> times_a, std::span<const int> statuses_a,
                           std::span<const double> times_b, std::span<const int> statuses_b) {
    const auto counts_a = aggregate(times_a, statuses_a);
    const auto counts_b = aggregate(times_b, statuses_b);

    auto has_events = [](const std::map<double, TimeCounts>& m) {
        return std::any_of(m.begin(), m.end(), [](const auto& kv) { return kv.second.events > 0; });
    };
    if (!has_events(counts_a) || !has_events(counts_b)) {
        throw Error(ErrorCode::NoEvents, "each group needs at least one event");
    }

    // Pooled distinct event times, walked in order with running risk-set sizes.
    std::map<double, std::pair<TimeCounts, TimeCounts>> pooled;
    for (const auto& [t, c] : counts_a) pooled[t].first = c;
    for (const auto& [t, c] : counts_b) pooled[t].second = c;

    int at_risk_a = static_cast<int>(times_a.size());
    int at_risk_b = static_cast<int>(times_b.size());
    double observed_minus_expected = 0.0;
    double variance = 0.0;
    for (const auto& [t, c] : pooled) {
        const int d = c.first.events + c.second.events;
        const int n = at_risk_a + at_risk_b;
        if (d > 0 && n > 1) {
            const double n1 = at_risk_a;
            const double expected = n1 * static_cast<double>(d) / n;
            observed_minus_expected += c.first.events - expected;
            variance += n1 * (static_cast<double>(at_risk_b) / n) * d *
                        (static_cast<double>(n - d) / (static_cast<double>(n) * (n - 1)));
        }
        at_risk_a -= c.first.total;
        at_risk_b -= c.second.total;
    }

    LogrankResult result;
    result.statistic =
        variance > 0.0 ? observed_minus_expected * observed_minus_expected / variance : 0.0;
    result.p_value = chisq1_upper_tail(result.statistic);
    return result;
}

}  // namespace dualcox
