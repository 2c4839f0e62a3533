#pragma once

#include "dualcox/step_function.hpp"

#include <Eigen/Dense>

#include <vector>

namespace dualcox {

class TrialDataset;

// Preprocessed survival design for weighted Cox estimation. The rows are
// sorted by descending time once at construction; every likelihood,
// derivative, and baseline evaluation is then a single suffix-accumulation
// pass, which keeps 1000-replicate studies loop-free. Ties share a group
// and are handled with Breslow's approximation (tied events see the full
// shared risk set).
class CoxDesign {
  public:
    CoxDesign(Eigen::VectorXd times, Eigen::VectorXi status, Eigen::MatrixXd covariates);
    explicit CoxDesign(const TrialDataset& dataset);

    int n() const { return static_cast<int>(times_.size()); }
    int p() const { return static_cast<int>(covariates_.cols()); }
    const Eigen::VectorXd& times() const { return times_; }
    const Eigen::VectorXi& status() const { return status_; }
    const Eigen::MatrixXd& covariates() const { return covariates_; }

    // Row indices sorted by descending time, tie groups delimited by
    // group_begin_/group_end_ pairs over that ordering.
    const std::vector<int>& descending_order() const { return descending_order_; }
    const std::vector<int>& group_offsets() const { return group_offsets_; }

  private:
    Eigen::VectorXd times_;
    Eigen::VectorXi status_;
    Eigen::MatrixXd covariates_;
    std::vector<int> descending_order_;
    std::vector<int> group_offsets_;  // k-th tie group is [offsets[k], offsets[k+1])
};

struct CoxOptions {
    int max_iter = 100;
    double grad_tol = 1e-8;  // infinity norm of the gradient
    int step_halving_max = 20;
    // Samples whose weight falls below the floor are excluded from the fit
    // (weights clamped to zero), mirroring the membership filter used by
    // the EM M-step.
    double weight_floor = 1e-6;
};

struct WeightedCoxFit {
    Eigen::VectorXd beta;
    Eigen::VectorXd std_errors;    // sqrt diag of inverse observed information
    Eigen::VectorXd hazard_ratios; // exp(beta), elementwise
    Eigen::VectorXd wald_p;        // two-sided normal tail of beta/se
    double log_partial_lik = 0.0;
    int iterations = 0;
    bool converged = false;
    // Any |beta_j| > 50 signals a divergent coefficient (monotone
    // likelihood); the fit is returned flagged rather than failed.
    bool monotone_likelihood = false;
};

// Weighted Cox log-partial likelihood
//   l(beta) = sum_i delta_i w_i [beta'x_i - log sum_{j: t_j >= t_i} w_j exp(beta'x_j)].
// With unit weights this is the ordinary Cox log-partial likelihood.
double weighted_partial_loglik(const CoxDesign& design, const Eigen::VectorXd& beta,
                               const Eigen::VectorXd& weights);

// Analytic first and second derivatives of weighted_partial_loglik.
// gradient = sum_i delta_i w_i (x_i - xbar_w(t_i)); hessian is minus the
// weighted risk-set covariance sum, symmetric negative semidefinite.
void partial_lik_gradient_hessian(const CoxDesign& design, const Eigen::VectorXd& beta,
                                  const Eigen::VectorXd& weights, Eigen::VectorXd& gradient,
                                  Eigen::MatrixXd& hessian);

// Newton-Raphson from beta = 0 (or beta_init) with step halving; the
// accepted log-partial likelihood never decreases. Standard errors come
// from the observed information at the optimum, with a one-shot 1e-8 ridge
// rescue for borderline-singular Hessians.
WeightedCoxFit fit_weighted_cox(const CoxDesign& design, const Eigen::VectorXd& weights,
                                const CoxOptions& options = {},
                                const Eigen::VectorXd* beta_init = nullptr);

struct BreslowBaseline {
    StepFunction increments;  // discrete hazard mass at each distinct event time
    StepFunction cumulative;  // running sum, right-continuous, starts at 0
};

// Breslow baseline hazard at the given coefficients:
//   h0(t) = (sum of weights of events at t) / (sum_{j: t_j >= t} w_j exp(beta'x_j)).
// Knots cover every distinct event time, including zero-weight increments.
BreslowBaseline breslow_baseline(const CoxDesign& design, const Eigen::VectorXd& beta,
                                 const Eigen::VectorXd& weights);

// Two-sided p-value for z = estimate/se under a standard normal reference.
double wald_two_sided_p(double z);

}  // namespace dualcox
