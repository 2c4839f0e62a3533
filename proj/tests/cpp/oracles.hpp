// Test-only reference implementations. Everything here evaluates the
// displayed formulas directly with naive loops and stays independent of the
// library's accumulation paths.
#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <vector>

namespace oracle {

struct Instance {
    Eigen::VectorXd times;
    Eigen::VectorXi status;
    Eigen::MatrixXd covariates;
    Eigen::VectorXd weights;
};

// Direct O(n^2) evaluation of
//   sum_i delta_i w_i [beta'x_i - log sum_{j: t_j >= t_i} w_j exp(beta'x_j)].
double naive_weighted_loglik(const Instance& instance, const Eigen::VectorXd& beta);

// Central finite differences of naive_weighted_loglik.
Eigen::VectorXd fd_gradient(const Instance& instance, const Eigen::VectorXd& beta, double h);
Eigen::MatrixXd fd_hessian(const Instance& instance, const Eigen::VectorXd& beta, double h);

// Dense shrinking-grid maximizer of the naive log-partial likelihood
// (p <= 2), refined until the grid spacing drops below `resolution`.
Eigen::VectorXd grid_polish_max(const Instance& instance, double half_range, double resolution);

// Breslow increments per Eqs.-(5)/(6) semantics: one entry per distinct
// event time (ascending), numerator = summed event weights at that time.
struct NaiveBaseline {
    std::vector<double> times;
    std::vector<double> increments;
    std::vector<double> cumulative;
};
NaiveBaseline naive_breslow(const Instance& instance, const Eigen::VectorXd& beta);

// Density, E-step ratio, and pi update evaluated straight from the
// displayed formulas.
double naive_log_density(double time, int status, double lp, const NaiveBaseline& baseline);

// Monte-Carlo permutation p-value for the two-sample log-rank statistic.
double permutation_logrank_p(const std::vector<double>& times_a, const std::vector<int>& status_a,
                             const std::vector<double>& times_b, const std::vector<int>& status_b,
                             int permutations, std::uint64_t seed);

// One-sample Kolmogorov-Smirnov statistic against the unit exponential.
double ks_statistic_exp1(std::vector<double> draws);

// Random small instance for oracle comparisons; mt19937_64 keeps the draw
// stream independent of the library generator.
Instance random_instance(int n, int p, double censor_fraction, std::uint64_t seed,
                         bool unit_weights);

}  // namespace oracle
