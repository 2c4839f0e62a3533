#include "dualcox/em.hpp"

#include "dualcox/error.hpp"
#include "dualcox/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dualcox {

namespace {

// Finite stand-in for a fully degenerate row contribution; keeps the
// observed log-likelihood representable while still dominating any
// comparison.
constexpr double kRowFloor = -1.0e15;

double log_or_sentinel(double value) {
    return value > 0.0 ? std::log(value) : kLogZero;
}

bool is_log_zero(double logv) {
    return logv <= kLogZeroThreshold;
}

// log(exp(a) + exp(b)) with sentinel awareness.
double log_sum_exp2(double a, double b) {
    if (is_log_zero(a)) return b;
    if (is_log_zero(b)) return a;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace

const char* convergence_reason_name(ConvergenceReason reason) {
    switch (reason) {
        case ConvergenceReason::not_converged: return "not_converged";
        case ConvergenceReason::both_criteria: return "abs_and_rel_criteria";
        case ConvergenceReason::compat_criterion: return "or_compat_criterion";
        case ConvergenceReason::max_iterations: return "max_iterations";
    }
    return "unknown";
}

const char* init_method_name(InitMethod method) {
    switch (method) {
        case InitMethod::boundary_bernoulli: return "boundary";
        case InitMethod::uniform_random: return "random";
        case InitMethod::pi_prior: return "pi-prior";
    }
    return "unknown";
}

MembershipMatrix::MembershipMatrix(const TrialDataset& dataset, const Eigen::MatrixXd& unlabeled_init) {
    const int n = dataset.n();
    u_.resize(n, 2);
    labeled_.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        labeled_[static_cast<std::size_t>(i)] = dataset.is_labeled(i) ? 1 : 0;
        if (dataset.is_labeled(i)) {
            const int k = dataset.response(i);
            u_(i, 0) = k == 1 ? 1.0 : 0.0;
            u_(i, 1) = k == 2 ? 1.0 : 0.0;
        } else {
            u_(i, 0) = unlabeled_init(i, 0);
            u_(i, 1) = unlabeled_init(i, 1);
        }
    }
}

MembershipMatrix MembershipMatrix::from_matrix(const TrialDataset& dataset, const Eigen::MatrixXd& u) {
    if (u.rows() != dataset.n() || u.cols() != 2) {
        throw Error(ErrorCode::DimensionMismatch, "membership matrix must be n x 2");
    }
    return MembershipMatrix(dataset, u);
}

void MembershipMatrix::set_unlabeled_row(int row, double u1, double u2) {
    if (labeled_[static_cast<std::size_t>(row)]) {
        throw Error(ErrorCode::InvalidInput, "labeled membership rows are fixed");
    }
    u_(row, 0) = u1;
    u_(row, 1) = u2;
}

double component_log_density(double time, int status, double linear_predictor,
                             const StepFunction& increments, const StepFunction& cumulative) {
    const double cumulative_hazard = cumulative(time);
    double logf = 0.0;
    if (cumulative_hazard > 0.0) {
        const double survival_term = -std::exp(linear_predictor) * cumulative_hazard;
        if (!std::isfinite(survival_term)) return kLogZero;
        logf = survival_term;
    }
    if (status == 1) {
        const auto idx = increments.knot_index(time);
        const double hazard = idx.has_value() ? increments.values()[*idx] : 0.0;
        if (hazard <= 0.0) return kLogZero;  // event with zero hazard mass
        logf += std::log(hazard) + linear_predictor;
    }
    return logf;
}

int e_step(const TrialDataset& dataset, const DualCoxModel& model, MembershipMatrix& memberships) {
    const Eigen::VectorXd eta1 = dataset.covariates() * model.beta[0];
    const Eigen::VectorXd eta2 = dataset.covariates() * model.beta[1];
    const double log_pi1 = log_or_sentinel(model.pi[0]);
    const double log_pi2 = log_or_sentinel(model.pi[1]);

    int degenerate = 0;
    for (int i = 0; i < dataset.n(); ++i) {
        if (dataset.is_labeled(i)) continue;
        const double t = dataset.times()(i);
        const int d = dataset.status()(i);
        const double a1 = log_pi1 + component_log_density(t, d, eta1(i), model.baseline_increments[0],
                                                          model.baseline_cumulative[0]);
        const double a2 = log_pi2 + component_log_density(t, d, eta2(i), model.baseline_increments[1],
                                                          model.baseline_cumulative[1]);
        if (is_log_zero(a1) && is_log_zero(a2)) {
            // Both components degenerate at this row: fall back to the prior.
            memberships.set_unlabeled_row(i, model.pi[0], model.pi[1]);
            ++degenerate;
        } else if (is_log_zero(a1)) {
            memberships.set_unlabeled_row(i, 0.0, 1.0);
        } else if (is_log_zero(a2)) {
            memberships.set_unlabeled_row(i, 1.0, 0.0);
        } else {
            const double m = std::max(a1, a2);
            const double e1 = std::exp(a1 - m);
            const double e2 = std::exp(a2 - m);
            memberships.set_unlabeled_row(i, e1 / (e1 + e2), e2 / (e1 + e2));
        }
    }
    return degenerate;
}

std::array<double, 2> m_step_pi(const MembershipMatrix& memberships) {
    const Eigen::MatrixXd& u = memberships.matrix();
    double sum1 = 0.0;
    double sum2 = 0.0;
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
        sum1 += u(i, 0);
        sum2 += u(i, 1);
    }
    const double n = static_cast<double>(u.rows());
    return {sum1 / n, sum2 / n};
}

std::array<ComponentEstimate, 2> m_step_beta_and_baseline(const CoxDesign& design,
                                                          const MembershipMatrix& memberships,
                                                          const CoxOptions& options,
                                                          const std::array<Eigen::VectorXd, 2>* warm_start) {
    std::array<ComponentEstimate, 2> estimates;
    for (int k = 0; k < 2; ++k) {
        const Eigen::VectorXd weights = memberships.matrix().col(k);
        const double mass = weights.sum();
        if (mass < 1.0) {
            throw Error(ErrorCode::ComponentCollapsed,
                        "component " + std::to_string(k + 1) + " membership mass " +
                            std::to_string(mass) + " < 1; try more restarts or another init method");
        }
        const Eigen::VectorXd* init =
            warm_start != nullptr && (*warm_start)[static_cast<std::size_t>(k)].size() == design.p()
                ? &(*warm_start)[static_cast<std::size_t>(k)]
                : nullptr;
        estimates[static_cast<std::size_t>(k)].fit = fit_weighted_cox(design, weights, options, init);
        estimates[static_cast<std::size_t>(k)].baseline =
            breslow_baseline(design, estimates[static_cast<std::size_t>(k)].fit.beta, weights);
    }
    return estimates;
}

double observed_loglik(const TrialDataset& dataset, const DualCoxModel& model) {
    const Eigen::VectorXd eta1 = dataset.covariates() * model.beta[0];
    const Eigen::VectorXd eta2 = dataset.covariates() * model.beta[1];
    const double log_pi1 = log_or_sentinel(model.pi[0]);
    const double log_pi2 = log_or_sentinel(model.pi[1]);

    double total = 0.0;
    for (int i = 0; i < dataset.n(); ++i) {
        const double t = dataset.times()(i);
        const int d = dataset.status()(i);
        double contribution;
        if (dataset.is_labeled(i)) {
            const int k = dataset.response(i);
            const double log_pi = k == 1 ? log_pi1 : log_pi2;
            const double logf = component_log_density(t, d, k == 1 ? eta1(i) : eta2(i),
                                                      model.baseline_increments[k - 1],
                                                      model.baseline_cumulative[k - 1]);
            contribution = is_log_zero(log_pi) || is_log_zero(logf) ? kRowFloor : log_pi + logf;
        } else {
            const double a1 = log_pi1 + component_log_density(t, d, eta1(i), model.baseline_increments[0],
                                                              model.baseline_cumulative[0]);
            const double a2 = log_pi2 + component_log_density(t, d, eta2(i), model.baseline_increments[1],
                                                              model.baseline_cumulative[1]);
            const double lse = log_sum_exp2(a1, a2);
            contribution = is_log_zero(lse) ? kRowFloor : lse;
        }
        total += contribution;
    }
    return total;
}

ConvergenceCheck check_convergence(const EmTrace& trace, double abstol, double reltol,
                                   ConvergenceRule rule) {
    ConvergenceCheck check;
    if (trace.records.size() < 2) return check;
    const EmIterationRecord& prev = trace.records[trace.records.size() - 2];
    const EmIterationRecord& last = trace.records.back();

    if (rule == ConvergenceRule::and_observed) {
        const double delta = std::abs(last.observed_loglik - prev.observed_loglik);
        const bool abs_ok = delta < abstol;
        double rel = 0.0;
        if (delta != 0.0) {
            rel = last.observed_loglik != 0.0 ? std::abs(delta / last.observed_loglik)
                                              : std::numeric_limits<double>::infinity();
        }
        if (abs_ok && rel < reltol) {
            check.converged = true;
            check.reason = ConvergenceReason::both_criteria;
        }
    } else {
        // Reference-compatible rule: either criterion passes, monitored on
        // the profile complete-data log-likelihood.
        const double now = last.expected_complete_loglik;
        const double before = prev.expected_complete_loglik;
        if (std::isfinite(now) && std::isfinite(before)) {
            const double delta = std::abs(now - before);
            if (delta < abstol || delta < std::abs(reltol * (now + reltol))) {
                check.converged = true;
                check.reason = ConvergenceReason::compat_criterion;
            }
        }
    }
    return check;
}

Initialization initialize(const TrialDataset& dataset, InitMethod method, std::uint64_t seed) {
    int count1 = 0;
    int count2 = 0;
    for (int i = 0; i < dataset.n(); ++i) {
        if (!dataset.is_labeled(i)) continue;
        if (dataset.response(i) == 1) ++count1;
        else ++count2;
    }
    const int n_labeled = count1 + count2;
    if (n_labeled == 0) {
        throw Error(ErrorCode::EmptyLabeledComponent, "no labeled rows to estimate pi from");
    }
    if (method == InitMethod::pi_prior && (count1 == 0 || count2 == 0)) {
        throw Error(ErrorCode::EmptyLabeledComponent,
                    "pi-prior initialization needs at least one labeled row per component");
    }
    const std::array<double, 2> pi0 = {static_cast<double>(count1) / n_labeled,
                                       static_cast<double>(count2) / n_labeled};

    // One draw per unlabeled row, in row order.
    SplitMix64 rng(seed);
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(dataset.n(), 2);
    for (int i = 0; i < dataset.n(); ++i) {
        if (dataset.is_labeled(i)) continue;
        double u1 = 0.0;
        switch (method) {
            case InitMethod::boundary_bernoulli: u1 = rng.bernoulli(0.5) ? 1.0 : 0.0; break;
            case InitMethod::uniform_random: u1 = rng.uniform01(); break;
            case InitMethod::pi_prior: u1 = pi0[0]; break;
        }
        u(i, 0) = u1;
        u(i, 1) = 1.0 - u1;
    }
    return Initialization{MembershipMatrix(dataset, u), pi0};
}

std::vector<int> classify(const TrialDataset& dataset, const MembershipMatrix& memberships) {
    std::vector<int> labels;
    for (int i = 0; i < dataset.n(); ++i) {
        if (dataset.is_labeled(i)) continue;
        labels.push_back(memberships(i, 1) >= memberships(i, 2) ? 1 : 2);
    }
    return labels;
}

namespace {

struct SingleRun {
    FitReport report;
    double final_loglik = 0.0;
    int iterations = 0;
};

double expected_complete_loglik(const MembershipMatrix& memberships,
                                const std::array<double, 2>& pi,
                                const std::array<ComponentEstimate, 2>& estimates) {
    // Profile complete-data quantity: weighted partial log-likelihoods plus
    // the mixing term, with the 0*log(0) = 0 convention.
    double total = estimates[0].fit.log_partial_lik + estimates[1].fit.log_partial_lik;
    const Eigen::MatrixXd& u = memberships.matrix();
    for (int k = 0; k < 2; ++k) {
        if (pi[static_cast<std::size_t>(k)] <= 0.0) continue;
        const double logpi = std::log(pi[static_cast<std::size_t>(k)]);
        for (Eigen::Index i = 0; i < u.rows(); ++i) total += u(i, k) * logpi;
    }
    return total;
}

SingleRun run_single_em(const TrialDataset& dataset, const CoxDesign& design,
                        const EmOptions& options, std::uint64_t seed) {
    Initialization init = initialize(dataset, options.init_method, seed);
    MembershipMatrix memberships = init.memberships;
    std::array<double, 2> pi = init.pi0;

    EmTrace trace;
    DualCoxModel model;
    std::array<ComponentEstimate, 2> estimates;
    std::array<Eigen::VectorXd, 2> previous_beta;
    bool have_previous_beta = false;
    ConvergenceReason reason = ConvergenceReason::max_iterations;

    int iter = 0;
    while (iter < options.max_em_iter) {
        ++iter;
        estimates = m_step_beta_and_baseline(design, memberships, options.cox,
                                             have_previous_beta ? &previous_beta : nullptr);
        model.pi = pi;
        for (int k = 0; k < 2; ++k) {
            model.beta[static_cast<std::size_t>(k)] = estimates[static_cast<std::size_t>(k)].fit.beta;
            model.baseline_increments[static_cast<std::size_t>(k)] =
                estimates[static_cast<std::size_t>(k)].baseline.increments;
            model.baseline_cumulative[static_cast<std::size_t>(k)] =
                estimates[static_cast<std::size_t>(k)].baseline.cumulative;
        }

        EmIterationRecord record;
        record.iteration = iter;
        record.observed_loglik = observed_loglik(dataset, model);
        record.expected_complete_loglik = expected_complete_loglik(memberships, pi, estimates);
        record.pi = pi;
        record.max_abs_delta_beta = 0.0;
        if (have_previous_beta) {
            for (int k = 0; k < 2; ++k) {
                record.max_abs_delta_beta =
                    std::max(record.max_abs_delta_beta,
                             (model.beta[static_cast<std::size_t>(k)] - previous_beta[static_cast<std::size_t>(k)])
                                 .lpNorm<Eigen::Infinity>());
            }
        }
        trace.records.push_back(record);

        trace.degenerate_rows += e_step(dataset, model, memberships);
        pi = m_step_pi(memberships);

        const ConvergenceCheck check =
            check_convergence(trace, options.abstol, options.reltol, options.convergence);
        if (check.converged) {
            reason = check.reason;
            break;
        }
        previous_beta[0] = model.beta[0];
        previous_beta[1] = model.beta[1];
        have_previous_beta = true;
    }

    trace.iterations = iter;
    trace.reason = reason;

    SingleRun run;
    run.final_loglik = trace.records.back().observed_loglik;
    run.iterations = iter;

    FitReport& report = run.report;
    model.pi = pi;  // final mixing estimate from the last membership update
    report.model = model;
    report.memberships = memberships;
    report.component_fits = {estimates[0].fit, estimates[1].fit};
    report.unlabeled_rows = dataset.unlabeled_rows();
    report.classifications = classify(dataset, memberships);
    report.trace = trace;
    report.observed_loglik = run.final_loglik;
    int responders = 0;
    for (int label : report.classifications) responders += (label == 1);
    report.control_response_rate =
        report.classifications.empty()
            ? 0.0
            : static_cast<double>(responders) / static_cast<double>(report.classifications.size());
    return run;
}

}  // namespace

FitReport fit_dual_cox(const TrialDataset& dataset, const EmOptions& options) {
    int count1 = 0;
    int count2 = 0;
    for (int i = 0; i < dataset.n(); ++i) {
        if (!dataset.is_labeled(i)) continue;
        if (dataset.response(i) == 1) ++count1;
        else ++count2;
    }
    if (count1 + count2 < 2 || count1 == 0 || count2 == 0) {
        throw Error(ErrorCode::EmptyLabeledComponent,
                    "need at least one labeled row per component (got " + std::to_string(count1) +
                        " responders, " + std::to_string(count2) + " non-responders)");
    }
    if (options.restarts < 1) {
        throw Error(ErrorCode::InvalidInput, "restarts must be >= 1");
    }

    const CoxDesign design(dataset);

    // Restarts are independent runs on their own substreams; the winner is
    // the highest final observed log-likelihood, ties broken by fewer
    // iterations, then by restart index. The selection is therefore
    // independent of any scheduling order.
    std::optional<SingleRun> best;
    int best_index = 0;
    for (int r = 0; r < options.restarts; ++r) {
        SingleRun run = run_single_em(dataset, design, options, substream_seed(options.seed, static_cast<std::uint64_t>(r)));
        const bool better =
            !best.has_value() || run.final_loglik > best->final_loglik ||
            (run.final_loglik == best->final_loglik && run.iterations < best->iterations);
        if (better) {
            best = std::move(run);
            best_index = r;
        }
    }
    best->report.restart_index = best_index;
    return std::move(best->report);
}

}  // namespace dualcox
