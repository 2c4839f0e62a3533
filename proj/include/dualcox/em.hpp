#pragma once

#include "dualcox/cox.hpp"
#include "dualcox/data.hpp"
#include "dualcox/step_function.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace dualcox {

// log(0) sentinel for degenerate component densities. Kept finite so that
// sums stay representable; log-sum-exp treats anything at or below
// kLogZeroThreshold as a true zero.
inline constexpr double kLogZero = -1.0e308;
inline constexpr double kLogZeroThreshold = -1.0e307;

// Two-component mixture state: mixing probabilities, per-component
// coefficients, and per-component discrete Breslow baselines.
struct DualCoxModel {
    std::array<double, 2> pi{0.5, 0.5};
    std::array<Eigen::VectorXd, 2> beta;
    std::array<StepFunction, 2> baseline_increments;
    std::array<StepFunction, 2> baseline_cumulative;
};

// n x 2 membership matrix. Labeled rows are one-hot from their response
// label and are never touched by the E-step; unlabeled rows hold posterior
// probabilities. Every row sums to 1.
class MembershipMatrix {
  public:
    MembershipMatrix() = default;
    MembershipMatrix(const TrialDataset& dataset, const Eigen::MatrixXd& unlabeled_init);

    static MembershipMatrix from_matrix(const TrialDataset& dataset, const Eigen::MatrixXd& u);

    int rows() const { return static_cast<int>(u_.rows()); }
    double operator()(int row, int component) const { return u_(row, component - 1); }
    const Eigen::MatrixXd& matrix() const { return u_; }

    void set_unlabeled_row(int row, double u1, double u2);
    Eigen::VectorXd column(int component) const { return u_.col(component - 1); }

  private:
    Eigen::MatrixXd u_;  // n x 2
    std::vector<std::uint8_t> labeled_;
};

enum class ConvergenceReason { not_converged, both_criteria, compat_criterion, max_iterations };

struct EmIterationRecord {
    int iteration = 0;
    double observed_loglik = 0.0;          // Eq.-(1)-style mixture log-likelihood
    double expected_complete_loglik = 0.0; // profile complete-data quantity (compat monitor)
    std::array<double, 2> pi{0.0, 0.0};
    double max_abs_delta_beta = 0.0;
};

struct EmTrace {
    std::vector<EmIterationRecord> records;
    int iterations = 0;
    ConvergenceReason reason = ConvergenceReason::not_converged;
    int degenerate_rows = 0;  // rows whose E-step fell back to the prior
};

enum class InitMethod { boundary_bernoulli, uniform_random, pi_prior };

enum class ConvergenceRule {
    // Both the absolute and the relative change of the observed
    // log-likelihood must pass.
    and_observed,
    // Compatibility mode: either criterion passes, monitored on the
    // profile complete-data log-likelihood.
    or_compat,
};

struct EmOptions {
    InitMethod init_method = InitMethod::pi_prior;
    int restarts = 1;
    std::uint64_t seed = 1;
    double abstol = 1e-5;
    double reltol = 1e-7;
    int max_em_iter = 1000;
    ConvergenceRule convergence = ConvergenceRule::and_observed;
    CoxOptions cox;
};

struct ComponentEstimate {
    WeightedCoxFit fit;
    BreslowBaseline baseline;
};

struct FitReport {
    DualCoxModel model;
    MembershipMatrix memberships;
    std::array<WeightedCoxFit, 2> component_fits;
    std::vector<int> unlabeled_rows;
    std::vector<int> classifications;  // parallel to unlabeled_rows, values in {1,2}
    EmTrace trace;
    double observed_loglik = 0.0;
    double control_response_rate = 0.0;  // fraction of unlabeled rows classified responder
    int restart_index = 0;
};

// log f_k(t, delta | x) with the discrete Breslow baseline:
//   delta * [log h0k(t) + lp] - exp(lp) * H0k(t).
// An event at a knot with zero hazard mass yields the kLogZero sentinel.
double component_log_density(double time, int status, double linear_predictor,
                             const StepFunction& increments, const StepFunction& cumulative);

// Posterior membership update for the unlabeled rows (labeled rows are
// fixed). Rows where both component densities are degenerate fall back to
// the prior; the count of such rows is returned.
int e_step(const TrialDataset& dataset, const DualCoxModel& model, MembershipMatrix& memberships);

// pi_k = column mean of the full membership matrix.
std::array<double, 2> m_step_pi(const MembershipMatrix& memberships);

// Per-component weighted Cox fit (weights = membership column, floored)
// followed by the Breslow baseline at the fitted coefficients (full
// weights). Aborts with ComponentCollapsed when a column's total mass
// drops below 1.
std::array<ComponentEstimate, 2> m_step_beta_and_baseline(const CoxDesign& design,
                                                          const MembershipMatrix& memberships,
                                                          const CoxOptions& options,
                                                          const std::array<Eigen::VectorXd, 2>* warm_start = nullptr);

// Observed-data log-likelihood: labeled rows contribute log pi_k f_k of
// their own component, unlabeled rows log(pi_1 f_1 + pi_2 f_2). Degenerate
// rows are clamped to a very negative, still finite contribution.
double observed_loglik(const TrialDataset& dataset, const DualCoxModel& model);

struct ConvergenceCheck {
    bool converged = false;
    ConvergenceReason reason = ConvergenceReason::not_converged;
};

// Compares the last two monitored values in the trace under the selected
// rule. Requires at least two recorded iterations.
ConvergenceCheck check_convergence(const EmTrace& trace, double abstol, double reltol,
                                   ConvergenceRule rule = ConvergenceRule::and_observed);

struct Initialization {
    MembershipMatrix memberships;
    std::array<double, 2> pi0{0.0, 0.0};
};

// pi0 is always the labeled empirical proportion. Unlabeled rows start as
// one-hot Bernoulli(0.5) draws (boundary), Uniform(0,1) responsibilities
// (random), or the constant prior (pi_prior).
Initialization initialize(const TrialDataset& dataset, InitMethod method, std::uint64_t seed);

// argmax_k u_mk per unlabeled row; ties go to component 1.
std::vector<int> classify(const TrialDataset& dataset, const MembershipMatrix& memberships);

// Full SPIRLS-EM fit with restarts. Restart r runs on substream_seed(seed, r);
// the run with the highest final observed log-likelihood wins, ties broken
// by fewer iterations then lower restart index.
FitReport fit_dual_cox(const TrialDataset& dataset, const EmOptions& options = {});

const char* convergence_reason_name(ConvergenceReason reason);
const char* init_method_name(InitMethod method);

}  // namespace dualcox
