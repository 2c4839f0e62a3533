#include "oracles.hpp"

#include "dualcox/survival.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

namespace oracle {

double naive_weighted_loglik(const Instance& instance, const Eigen::VectorXd& beta) {
    const int n = static_cast<int>(instance.times.size());
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        if (instance.status(i) != 1 || instance.weights(i) <= 0.0) continue;
        double risk = 0.0;
        for (int j = 0; j < n; ++j) {
            if (instance.times(j) >= instance.times(i)) {
                risk += instance.weights(j) * std::exp(instance.covariates.row(j).dot(beta));
            }
        }
        total += instance.weights(i) * (instance.covariates.row(i).dot(beta) - std::log(risk));
    }
    return total;
}

Eigen::VectorXd fd_gradient(const Instance& instance, const Eigen::VectorXd& beta, double h) {
    Eigen::VectorXd grad(beta.size());
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        Eigen::VectorXd hi = beta;
        Eigen::VectorXd lo = beta;
        hi(j) += h;
        lo(j) -= h;
        grad(j) = (naive_weighted_loglik(instance, hi) - naive_weighted_loglik(instance, lo)) / (2 * h);
    }
    return grad;
}

Eigen::MatrixXd fd_hessian(const Instance& instance, const Eigen::VectorXd& beta, double h) {
    const Eigen::Index p = beta.size();
    Eigen::MatrixXd hess(p, p);
    const double f0 = naive_weighted_loglik(instance, beta);
    for (Eigen::Index a = 0; a < p; ++a) {
        for (Eigen::Index b = 0; b <= a; ++b) {
            Eigen::VectorXd pp = beta, pm = beta, mp = beta, mm = beta;
            if (a == b) {
                pp(a) += h;
                mm(a) -= h;
                hess(a, a) = (naive_weighted_loglik(instance, pp) - 2 * f0 +
                              naive_weighted_loglik(instance, mm)) /
                             (h * h);
            } else {
                pp(a) += h; pp(b) += h;
                pm(a) += h; pm(b) -= h;
                mp(a) -= h; mp(b) += h;
                mm(a) -= h; mm(b) -= h;
                hess(a, b) = (naive_weighted_loglik(instance, pp) - naive_weighted_loglik(instance, pm) -
                              naive_weighted_loglik(instance, mp) + naive_weighted_loglik(instance, mm)) /
                             (4 * h * h);
                hess(b, a) = hess(a, b);
            }
        }
    }
    return hess;
}

Eigen::VectorXd grid_polish_max(const Instance& instance, double half_range, double resolution) {
    const int p = static_cast<int>(instance.covariates.cols());
    Eigen::VectorXd center = Eigen::VectorXd::Zero(p);
    double span = half_range;
    constexpr int kPoints = 17;  // per axis
    // Concavity keeps the optimum within one cell of the best grid point,
    // so recentring with span = old spacing never loses it.
    while (2.0 * span / (kPoints - 1) > 0.5 * resolution) {
        Eigen::VectorXd best = center;
        double best_value = naive_weighted_loglik(instance, center);
        const int total = p == 1 ? kPoints : kPoints * kPoints;
        for (int idx = 0; idx < total; ++idx) {
            Eigen::VectorXd candidate(p);
            int rest = idx;
            for (int d = 0; d < p; ++d) {
                const int step = rest % kPoints;
                rest /= kPoints;
                candidate(d) = center(d) - span + 2.0 * span * step / (kPoints - 1);
            }
            const double value = naive_weighted_loglik(instance, candidate);
            if (value > best_value) {
                best_value = value;
                best = candidate;
            }
        }
        center = best;
        span = 2.0 * span / (kPoints - 1);
    }
    return center;
}

NaiveBaseline naive_breslow(const Instance& instance, const Eigen::VectorXd& beta) {
    const int n = static_cast<int>(instance.times.size());
    std::set<double> event_times;
    for (int i = 0; i < n; ++i) {
        if (instance.status(i) == 1) event_times.insert(instance.times(i));
    }
    NaiveBaseline baseline;
    double running = 0.0;
    for (double t : event_times) {
        double numerator = 0.0;
        double denominator = 0.0;
        for (int j = 0; j < n; ++j) {
            if (instance.status(j) == 1 && instance.times(j) == t) numerator += instance.weights(j);
            if (instance.times(j) >= t) {
                denominator += instance.weights(j) * std::exp(instance.covariates.row(j).dot(beta));
            }
        }
        const double increment = numerator > 0.0 ? numerator / denominator : 0.0;
        running += increment;
        baseline.times.push_back(t);
        baseline.increments.push_back(increment);
        baseline.cumulative.push_back(running);
    }
    return baseline;
}

double naive_log_density(double time, int status, double lp, const NaiveBaseline& baseline) {
    double cumulative = 0.0;
    double increment = 0.0;
    for (std::size_t k = 0; k < baseline.times.size(); ++k) {
        if (baseline.times[k] <= time) cumulative = baseline.cumulative[k];
        if (baseline.times[k] == time) increment = baseline.increments[k];
    }
    double logf = -std::exp(lp) * cumulative;
    if (status == 1) {
        if (increment <= 0.0) return -1.0e308;
        logf += std::log(increment) + lp;
    }
    return logf;
}

double permutation_logrank_p(const std::vector<double>& times_a, const std::vector<int>& status_a,
                             const std::vector<double>& times_b, const std::vector<int>& status_b,
                             int permutations, std::uint64_t seed) {
    std::vector<double> times(times_a);
    times.insert(times.end(), times_b.begin(), times_b.end());
    std::vector<int> status(status_a);
    status.insert(status.end(), status_b.begin(), status_b.end());
    const std::size_t n_a = times_a.size();

    const double observed =
        dualcox::logrank_test(times_a, status_a, times_b, status_b).statistic;

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> index(times.size());
    for (std::size_t i = 0; i < index.size(); ++i) index[i] = i;

    int at_least = 0;
    int valid = 0;
    for (int rep = 0; rep < permutations; ++rep) {
        std::shuffle(index.begin(), index.end(), rng);
        std::vector<double> ta, tb;
        std::vector<int> sa, sb;
        for (std::size_t i = 0; i < index.size(); ++i) {
            if (i < n_a) {
                ta.push_back(times[index[i]]);
                sa.push_back(status[index[i]]);
            } else {
                tb.push_back(times[index[i]]);
                sb.push_back(status[index[i]]);
            }
        }
        try {
            const double stat = dualcox::logrank_test(ta, sa, tb, sb).statistic;
            ++valid;
            if (stat >= observed) ++at_least;
        } catch (...) {
            // a permutation put every event in one group; skip it
        }
    }
    return valid > 0 ? static_cast<double>(at_least) / valid : 1.0;
}

double ks_statistic_exp1(std::vector<double> draws) {
    std::sort(draws.begin(), draws.end());
    const double n = static_cast<double>(draws.size());
    double d = 0.0;
    for (std::size_t i = 0; i < draws.size(); ++i) {
        const double cdf = 1.0 - std::exp(-draws[i]);
        const double hi = (static_cast<double>(i) + 1.0) / n - cdf;
        const double lo = cdf - static_cast<double>(i) / n;
        d = std::max(d, std::max(hi, lo));
    }
    return d;
}

Instance random_instance(int n, int p, double censor_fraction, std::uint64_t seed,
                         bool unit_weights) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    Instance instance;
    instance.covariates.resize(n, p);
    instance.times.resize(n);
    instance.status.resize(n);
    instance.weights.resize(n);
    Eigen::VectorXd beta_true(p);
    for (int j = 0; j < p; ++j) beta_true(j) = -1.0 + 2.0 * uniform(rng);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) instance.covariates(i, j) = normal(rng);
        const double lp = instance.covariates.row(i).dot(beta_true);
        const double event = -std::log(std::max(uniform(rng), 1e-12)) / std::exp(lp);
        instance.times(i) = event;
        instance.status(i) = 1;
        if (uniform(rng) < censor_fraction) {
            instance.times(i) = event * uniform(rng);
            instance.status(i) = 0;
        }
        instance.weights(i) = unit_weights ? 1.0 : 0.05 + uniform(rng);
    }
    // keep at least one event
    instance.status(0) = 1;
    return instance;
}

}  // namespace oracle
