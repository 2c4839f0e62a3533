#include "dualcox/cox.hpp"

#include "dualcox/data.hpp"
#include "dualcox/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace dualcox {

namespace {

constexpr double kMonotoneBetaBound = 50.0;
constexpr double kHessianRidge = 1e-8;

void check_weights(const CoxDesign& design, const Eigen::VectorXd& weights) {
    if (weights.size() != design.n()) {
        throw Error(ErrorCode::DimensionMismatch, "weights length does not match sample count");
    }
    if ((weights.array() < 0.0).any()) {
        throw Error(ErrorCode::InvalidInput, "weights must be nonnegative");
    }
}

// Shift constant for the exp terms: max linear predictor over rows that
// carry weight. Subtracting it is exact for the partial likelihood and
// keeps every exp() in range.
double predictor_shift(const Eigen::VectorXd& eta, const Eigen::VectorXd& weights) {
    double shift = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        if (weights(i) > 0.0) shift = std::max(shift, eta(i));
    }
    if (!std::isfinite(shift)) {
        throw Error(ErrorCode::AllWeightsZero, "all weights are zero");
    }
    return shift;
}

bool has_weighted_event(const CoxDesign& design, const Eigen::VectorXd& weights) {
    for (int i = 0; i < design.n(); ++i) {
        if (design.status()(i) == 1 && weights(i) > 0.0) return true;
    }
    return false;
}

}  // namespace

CoxDesign::CoxDesign(Eigen::VectorXd times, Eigen::VectorXi status, Eigen::MatrixXd covariates)
    : times_(std::move(times)), status_(std::move(status)), covariates_(std::move(covariates)) {
    const int n = static_cast<int>(times_.size());
    if (status_.size() != n || covariates_.rows() != n) {
        throw Error(ErrorCode::DimensionMismatch, "design vectors differ in length");
    }
    descending_order_.resize(static_cast<std::size_t>(n));
    std::iota(descending_order_.begin(), descending_order_.end(), 0);
    std::sort(descending_order_.begin(), descending_order_.end(), [&](int a, int b) {
        if (times_(a) != times_(b)) return times_(a) > times_(b);
        return a < b;
    });
    group_offsets_.push_back(0);
    for (int k = 1; k < n; ++k) {
        if (times_(descending_order_[static_cast<std::size_t>(k)]) !=
            times_(descending_order_[static_cast<std::size_t>(k - 1)])) {
            group_offsets_.push_back(k);
        }
    }
    group_offsets_.push_back(n);
}

CoxDesign::CoxDesign(const TrialDataset& dataset)
    : CoxDesign(dataset.times(), dataset.status(), dataset.covariates()) {}

double weighted_partial_loglik(const CoxDesign& design, const Eigen::VectorXd& beta,
                               const Eigen::VectorXd& weights) {
    check_weights(design, weights);
    if (!has_weighted_event(design, weights)) {
        throw Error(ErrorCode::AllWeightsZero, "no event carries positive weight");
    }
    const Eigen::VectorXd eta = design.covariates() * beta;
    const double shift = predictor_shift(eta, weights);

    const auto& order = design.descending_order();
    const auto& offsets = design.group_offsets();
    double risk_sum = 0.0;
    double loglik = 0.0;
    for (std::size_t g = 0; g + 1 < offsets.size(); ++g) {
        // Ties share the risk set: accumulate the whole group first.
        // Zero-weight rows are skipped outright so their predictors cannot
        // overflow into the sums.
        for (int k = offsets[g]; k < offsets[g + 1]; ++k) {
            const int i = order[static_cast<std::size_t>(k)];
            if (weights(i) > 0.0) risk_sum += weights(i) * std::exp(eta(i) - shift);
        }
        for (int k = offsets[g]; k < offsets[g + 1]; ++k) {
            const int i = order[static_cast<std::size_t>(k)];
            if (design.status()(i) != 1 || weights(i) <= 0.0) continue;
            if (risk_sum <= 0.0) {
                throw Error(ErrorCode::EmptyRiskSet, "no positively weighted subject at risk");
            }
            loglik += weights(i) * ((eta(i) - shift) - std::log(risk_sum));
        }
    }
    return loglik;
}

void partial_lik_gradient_hessian(const CoxDesign& design, const Eigen::VectorXd& beta,
                                  const Eigen::VectorXd& weights, Eigen::VectorXd& gradient,
                                  Eigen::MatrixXd& hessian) {
    check_weights(design, weights);
    if (!has_weighted_event(design, weights)) {
        throw Error(ErrorCode::AllWeightsZero, "no event carries positive weight");
    }
    const int p = design.p();
    const Eigen::VectorXd eta = design.covariates() * beta;
    const double shift = predictor_shift(eta, weights);

    gradient = Eigen::VectorXd::Zero(p);
    hessian = Eigen::MatrixXd::Zero(p, p);

    const auto& order = design.descending_order();
    const auto& offsets = design.group_offsets();
    double s0 = 0.0;
    Eigen::VectorXd s1 = Eigen::VectorXd::Zero(p);
    Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(p, p);
    Eigen::VectorXd xbar(p);
    Eigen::MatrixXd vbar(p, p);
    for (std::size_t g = 0; g + 1 < offsets.size(); ++g) {
        for (int k = offsets[g]; k < offsets[g + 1]; ++k) {
            const int i = order[static_cast<std::size_t>(k)];
            if (weights(i) <= 0.0) continue;
            const double r = weights(i) * std::exp(eta(i) - shift);
            if (r == 0.0) continue;
            const auto x = design.covariates().row(i).transpose();
            s0 += r;
            s1.noalias() += r * x;
            s2.noalias() += r * (x * x.transpose());
        }
        for (int k = offsets[g]; k < offsets[g + 1]; ++k) {
            const int i = order[static_cast<std::size_t>(k)];
            const double w = weights(i);
            if (design.status()(i) != 1 || w <= 0.0) continue;
            if (s0 <= 0.0) {
                throw Error(ErrorCode::EmptyRiskSet, "no positively weighted subject at risk");
            }
            const auto x = design.covariates().row(i).transpose();
            xbar = s1 / s0;
            vbar = s2 / s0 - xbar * xbar.transpose();
            gradient.noalias() += w * (x - xbar);
            hessian.noalias() -= w * vbar;
        }
    }
}

namespace {

// Solve (-hessian [+ ridge]) * x = rhs by Cholesky; returns false when the
// matrix is not positive definite even after the ridge rescue.
bool solve_neg_hessian(const Eigen::MatrixXd& hessian, const Eigen::VectorXd& rhs,
                       Eigen::VectorXd& solution) {
    Eigen::MatrixXd info = -hessian;
    Eigen::LLT<Eigen::MatrixXd> llt(info);
    if (llt.info() != Eigen::Success) {
        info.diagonal().array() += kHessianRidge;
        llt.compute(info);
        if (llt.info() != Eigen::Success) return false;
    }
    solution = llt.solve(rhs);
    return solution.allFinite();
}

bool invert_neg_hessian(const Eigen::MatrixXd& hessian, Eigen::MatrixXd& covariance) {
    Eigen::MatrixXd info = -hessian;
    Eigen::LLT<Eigen::MatrixXd> llt(info);
    if (llt.info() != Eigen::Success) {
        info.diagonal().array() += kHessianRidge;
        llt.compute(info);
        if (llt.info() != Eigen::Success) return false;
    }
    covariance = llt.solve(Eigen::MatrixXd::Identity(info.rows(), info.cols()));
    return covariance.allFinite();
}

}  // namespace

double wald_two_sided_p(double z) {
    return std::erfc(std::abs(z) / std::sqrt(2.0));
}

WeightedCoxFit fit_weighted_cox(const CoxDesign& design, const Eigen::VectorXd& weights,
                                const CoxOptions& options, const Eigen::VectorXd* beta_init) {
    check_weights(design, weights);
    if (design.p() < 1) {
        throw Error(ErrorCode::InvalidInput, "need at least one covariate");
    }

    // Membership filter: weights under the floor are clamped to zero, which
    // removes those samples from every sum.
    Eigen::VectorXd w = weights;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (w(i) < options.weight_floor) w(i) = 0.0;
    }
    if (!has_weighted_event(design, w)) {
        throw Error(ErrorCode::AllWeightsZero, "no event carries weight above the floor");
    }

    const int p = design.p();
    Eigen::VectorXd beta = beta_init != nullptr ? *beta_init : Eigen::VectorXd::Zero(p);
    double loglik = weighted_partial_loglik(design, beta, w);

    WeightedCoxFit fit;
    fit.converged = false;
    Eigen::VectorXd gradient(p), step(p), candidate(p);
    Eigen::MatrixXd hessian(p, p);

    int iterations = 0;
    for (int iter = 0; iter < options.max_iter; ++iter) {
        partial_lik_gradient_hessian(design, beta, w, gradient, hessian);
        if (gradient.lpNorm<Eigen::Infinity>() < options.grad_tol) {
            fit.converged = true;
            break;
        }
        if (beta.lpNorm<Eigen::Infinity>() > kMonotoneBetaBound) {
            fit.monotone_likelihood = true;
            break;
        }
        if (!solve_neg_hessian(hessian, gradient, step)) {
            throw Error(ErrorCode::SingularHessian, "information matrix not positive definite");
        }

        // Near the optimum the true improvement drops below the evaluation
        // noise of the objective; the acceptance slack keeps the final
        // polishing steps from stalling there.
        const double noise_slack = 1e-12 * (std::abs(loglik) + 1.0);
        double scale = 1.0;
        bool accepted = false;
        for (int h = 0; h <= options.step_halving_max; ++h) {
            candidate = beta + scale * step;
            const double trial = weighted_partial_loglik(design, candidate, w);
            if (std::isfinite(trial) && trial >= loglik - noise_slack) {
                beta = candidate;
                loglik = std::max(loglik, trial);
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        ++iterations;
        if (!accepted) break;  // stalled: keep the best iterate
    }

    if (!fit.converged) {
        partial_lik_gradient_hessian(design, beta, w, gradient, hessian);
        fit.converged = gradient.lpNorm<Eigen::Infinity>() < options.grad_tol;
    }
    if (beta.lpNorm<Eigen::Infinity>() > kMonotoneBetaBound) fit.monotone_likelihood = true;

    fit.beta = beta;
    fit.log_partial_lik = loglik;
    fit.iterations = iterations;

    partial_lik_gradient_hessian(design, beta, w, gradient, hessian);
    Eigen::MatrixXd covariance;
    if (!invert_neg_hessian(hessian, covariance)) {
        throw Error(ErrorCode::SingularHessian, "information matrix not invertible at the optimum");
    }
    fit.std_errors = covariance.diagonal().array().max(0.0).sqrt();
    fit.hazard_ratios.resize(p);
    for (int j = 0; j < p; ++j) fit.hazard_ratios(j) = std::exp(beta(j));
    fit.wald_p.resize(p);
    for (int j = 0; j < p; ++j) {
        fit.wald_p(j) = fit.std_errors(j) > 0.0 ? wald_two_sided_p(beta(j) / fit.std_errors(j)) : 0.0;
    }
    return fit;
}

BreslowBaseline breslow_baseline(const CoxDesign& design, const Eigen::VectorXd& beta,
                                 const Eigen::VectorXd& weights) {
    check_weights(design, weights);
    const Eigen::VectorXd eta = design.covariates() * beta;
    double shift = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        if (weights(i) > 0.0) shift = std::max(shift, eta(i));
    }
    const bool any_weight = std::isfinite(shift);

    const auto& order = design.descending_order();
    const auto& offsets = design.group_offsets();
    double risk_sum = 0.0;  // sum of w_j exp(eta_j - shift) over t_j >= t
    std::vector<double> knots_desc;
    std::vector<double> increments_desc;
    for (std::size_t g = 0; g + 1 < offsets.size(); ++g) {
        for (int k = offsets[g]; k < offsets[g + 1]; ++k) {
            const int i = order[static_cast<std::size_t>(k)];
            if (weights(i) > 0.0) risk_sum += weights(i) * std::exp(eta(i) - shift);
        }
        double event_weight = 0.0;
        bool has_event = false;
        for (int k = offsets[g]; k < offsets[g + 1]; ++k) {
            const int i = order[static_cast<std::size_t>(k)];
            if (design.status()(i) == 1) {
                has_event = true;
                event_weight += weights(i);
            }
        }
        if (!has_event) continue;
        double increment = 0.0;
        if (event_weight > 0.0) {
            if (risk_sum <= 0.0 || !any_weight) {
                throw Error(ErrorCode::EmptyRiskSet, "no positively weighted subject at risk");
            }
            increment = event_weight / risk_sum * std::exp(-shift);
        }
        knots_desc.push_back(design.times()(order[static_cast<std::size_t>(offsets[g])]));
        increments_desc.push_back(increment);
    }

    std::vector<double> knots(knots_desc.rbegin(), knots_desc.rend());
    std::vector<double> increments(increments_desc.rbegin(), increments_desc.rend());
    std::vector<double> cumulative(increments.size());
    double running = 0.0;
    for (std::size_t i = 0; i < increments.size(); ++i) {
        running += increments[i];
        cumulative[i] = running;
    }

    BreslowBaseline baseline;
    baseline.increments = StepFunction(knots, increments, 0.0);
    baseline.cumulative = StepFunction(std::move(knots), std::move(cumulative), 0.0);
    return baseline;
}

}  // namespace dualcox
