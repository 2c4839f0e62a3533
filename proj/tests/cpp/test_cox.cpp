#include "dualcox/cox.hpp"

#include "dualcox/error.hpp"
#include "oracles.hpp"

#include "doctest.h"

#include <cmath>
#include <random>

using namespace dualcox;

namespace {

CoxDesign design_from(const oracle::Instance& instance) {
    return CoxDesign(instance.times, instance.status, instance.covariates);
}

}  // namespace

TEST_CASE("partial loglik at beta 0 counts risk-set sizes") {
    oracle::Instance inst;
    inst.times = (Eigen::VectorXd(3) << 1.0, 2.0, 3.0).finished();
    inst.status = (Eigen::VectorXi(3) << 1, 1, 1).finished();
    inst.covariates = (Eigen::MatrixXd(3, 1) << 0.4, -1.2, 0.7).finished();
    inst.weights = Eigen::VectorXd::Ones(3);
    CoxDesign design = design_from(inst);
    const double ll = weighted_partial_loglik(design, Eigen::VectorXd::Zero(1), inst.weights);
    CHECK(ll == doctest::Approx(-std::log(3.0) - std::log(2.0) - std::log(1.0)));
}

TEST_CASE("weighted partial loglik matches direct formula evaluation") {
    oracle::Instance inst;
    inst.times = (Eigen::VectorXd(3) << 2.0, 1.0, 3.0).finished();
    inst.status = (Eigen::VectorXi(3) << 1, 1, 0).finished();
    inst.covariates = (Eigen::MatrixXd(3, 2) << 0.5, -1.0, 1.5, 0.25, -0.75, 2.0).finished();

    SUBCASE("all weights one half") {
        inst.weights = Eigen::VectorXd::Constant(3, 0.5);
    }
    SUBCASE("mixed weights") {
        inst.weights = (Eigen::VectorXd(3) << 0.2, 0.9, 0.4).finished();
    }

    CoxDesign design = design_from(inst);
    const Eigen::VectorXd beta = (Eigen::VectorXd(2) << 0.3, -0.6).finished();
    CHECK(weighted_partial_loglik(design, beta, inst.weights) ==
          doctest::Approx(oracle::naive_weighted_loglik(inst, beta)).epsilon(1e-12));
}

TEST_CASE("all-zero weights are rejected") {
    oracle::Instance inst = oracle::random_instance(5, 1, 0.2, 11, true);
    CoxDesign design = design_from(inst);
    const Eigen::VectorXd zero_w = Eigen::VectorXd::Zero(5);
    CHECK_THROWS_AS(weighted_partial_loglik(design, Eigen::VectorXd::Zero(1), zero_w), Error);
    CHECK_THROWS_AS(fit_weighted_cox(design, zero_w), Error);
}

TEST_CASE("analytic derivatives match finite differences of the naive loglik") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> uniform(-0.8, 0.8);
    for (int trial = 0; trial < 20; ++trial) {
        oracle::Instance inst =
            oracle::random_instance(12 + trial % 8, 2, 0.25, 300 + static_cast<std::uint64_t>(trial), false);
        CoxDesign design = design_from(inst);
        for (int point = 0; point < 5; ++point) {
            Eigen::VectorXd beta(2);
            beta << uniform(rng), uniform(rng);
            Eigen::VectorXd grad;
            Eigen::MatrixXd hess;
            partial_lik_gradient_hessian(design, beta, inst.weights, grad, hess);

            const Eigen::VectorXd fd_grad = oracle::fd_gradient(inst, beta, 1e-5);
            const Eigen::MatrixXd fd_hess = oracle::fd_hessian(inst, beta, 1e-4);
            const double grad_scale = std::max(1.0, fd_grad.norm());
            const double hess_scale = std::max(1.0, fd_hess.norm());
            CHECK((grad - fd_grad).norm() / grad_scale < 1e-6);
            CHECK((hess - fd_hess).norm() / hess_scale < 1e-6);
            // symmetric negative semidefinite
            CHECK((hess - hess.transpose()).norm() < 1e-12);
            const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigensolver(hess);
            CHECK(eigensolver.eigenvalues().maxCoeff() < 1e-10);
        }
    }
}

TEST_CASE("constant covariate column has zero gradient entry") {
    oracle::Instance inst = oracle::random_instance(10, 2, 0.2, 5, true);
    inst.covariates.col(1).setConstant(3.25);
    CoxDesign design = design_from(inst);
    for (double b : {-1.0, 0.0, 0.7}) {
        Eigen::VectorXd beta(2);
        beta << b, 0.4;
        Eigen::VectorXd grad;
        Eigen::MatrixXd hess;
        partial_lik_gradient_hessian(design, beta, inst.weights, grad, hess);
        CHECK(std::abs(grad(1)) < 1e-10);
    }
}

TEST_CASE("risk set of one contributes nothing to the derivatives") {
    oracle::Instance inst;
    inst.times = (Eigen::VectorXd(1) << 4.0).finished();
    inst.status = (Eigen::VectorXi(1) << 1).finished();
    inst.covariates = (Eigen::MatrixXd(1, 1) << 2.0).finished();
    inst.weights = Eigen::VectorXd::Ones(1);
    CoxDesign design = design_from(inst);
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;
    partial_lik_gradient_hessian(design, (Eigen::VectorXd(1) << 0.3).finished(), inst.weights, grad,
                                 hess);
    CHECK(grad(0) == 0.0);
    CHECK(hess(0, 0) == 0.0);
}

TEST_CASE("Newton fit agrees with the grid-search oracle") {
    oracle::Instance inst = oracle::random_instance(20, 2, 0.2, 77, true);
    CoxDesign design = design_from(inst);
    WeightedCoxFit fit = fit_weighted_cox(design, inst.weights);
    REQUIRE(fit.converged);
    REQUIRE_FALSE(fit.monotone_likelihood);
    const Eigen::VectorXd oracle_beta = oracle::grid_polish_max(inst, 8.0, 1e-8);
    CHECK((fit.beta - oracle_beta).lpNorm<Eigen::Infinity>() < 1e-6);
}

TEST_CASE("fit output fields are consistent") {
    oracle::Instance inst = oracle::random_instance(40, 2, 0.3, 4242, true);
    CoxDesign design = design_from(inst);
    WeightedCoxFit fit = fit_weighted_cox(design, inst.weights);
    REQUIRE(fit.converged);
    for (int j = 0; j < 2; ++j) {
        CHECK(std::isfinite(fit.beta(j)));
        CHECK(std::isfinite(fit.std_errors(j)));
        CHECK(fit.hazard_ratios(j) == std::exp(fit.beta(j)));
        CHECK(fit.wald_p(j) == wald_two_sided_p(fit.beta(j) / fit.std_errors(j)));
        CHECK(fit.wald_p(j) >= 0.0);
        CHECK(fit.wald_p(j) <= 1.0);
    }
    CHECK(fit.log_partial_lik >=
          weighted_partial_loglik(design, Eigen::VectorXd::Zero(2), inst.weights));
}

TEST_CASE("null coverage: |beta| < 3 SE in at least 99% of seeds") {
    // Covariates independent of survival; Wald intervals should cover 0.
    int total = 0;
    int covered = 0;
    std::mt19937_64 rng(909);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    for (int seed = 0; seed < 100; ++seed) {
        const int n = 500;
        oracle::Instance inst;
        inst.times.resize(n);
        inst.status.resize(n);
        inst.covariates.resize(n, 2);
        inst.weights = Eigen::VectorXd::Ones(n);
        for (int i = 0; i < n; ++i) {
            inst.covariates(i, 0) = normal(rng);
            inst.covariates(i, 1) = normal(rng);
            inst.times(i) = -std::log(std::max(uniform(rng), 1e-12));
            inst.status(i) = uniform(rng) < 0.8 ? 1 : 0;
        }
        inst.status(0) = 1;
        CoxDesign design(inst.times, inst.status, inst.covariates);
        WeightedCoxFit fit = fit_weighted_cox(design, inst.weights);
        for (int j = 0; j < 2; ++j) {
            ++total;
            covered += std::abs(fit.beta(j)) < 3.0 * fit.std_errors(j);
        }
    }
    CHECK(static_cast<double>(covered) / total >= 0.99);
}

TEST_CASE("duplicating samples at half weight reproduces the fit") {
    oracle::Instance inst = oracle::random_instance(15, 2, 0.25, 31, true);
    CoxDesign design = design_from(inst);
    WeightedCoxFit base = fit_weighted_cox(design, inst.weights);

    const int n = static_cast<int>(inst.times.size());
    Eigen::VectorXd times2(2 * n);
    Eigen::VectorXi status2(2 * n);
    Eigen::MatrixXd x2(2 * n, 2);
    for (int i = 0; i < n; ++i) {
        times2(2 * i) = times2(2 * i + 1) = inst.times(i);
        status2(2 * i) = status2(2 * i + 1) = inst.status(i);
        x2.row(2 * i) = inst.covariates.row(i);
        x2.row(2 * i + 1) = inst.covariates.row(i);
    }
    CoxDesign doubled(times2, status2, x2);
    WeightedCoxFit half = fit_weighted_cox(doubled, Eigen::VectorXd::Constant(2 * n, 0.5));
    CHECK((base.beta - half.beta).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("positive rescaling of the weights leaves the argmax unchanged") {
    oracle::Instance inst = oracle::random_instance(18, 2, 0.25, 67, false);
    CoxDesign design = design_from(inst);
    WeightedCoxFit base = fit_weighted_cox(design, inst.weights);
    WeightedCoxFit scaled = fit_weighted_cox(design, (3.7 * inst.weights).eval());
    CHECK((base.beta - scaled.beta).lpNorm<Eigen::Infinity>() < 1e-7);
}

TEST_CASE("covariate shift invariance") {
    oracle::Instance inst = oracle::random_instance(18, 2, 0.25, 68, true);
    CoxDesign design = design_from(inst);
    WeightedCoxFit base = fit_weighted_cox(design, inst.weights);
    Eigen::MatrixXd shifted = inst.covariates;
    shifted.col(0).array() += 11.0;
    CoxDesign shifted_design(inst.times, inst.status, shifted);
    WeightedCoxFit moved = fit_weighted_cox(shifted_design, inst.weights);
    CHECK((base.beta - moved.beta).lpNorm<Eigen::Infinity>() < 1e-7);
}

TEST_CASE("breslow at beta 0, unit weights, is Nelson-Aalen") {
    oracle::Instance inst;
    inst.times = (Eigen::VectorXd(4) << 1.0, 2.0, 3.0, 4.0).finished();
    inst.status = (Eigen::VectorXi(4) << 1, 1, 0, 1).finished();
    inst.covariates = Eigen::MatrixXd::Zero(4, 1);
    inst.weights = Eigen::VectorXd::Ones(4);
    CoxDesign design = design_from(inst);
    BreslowBaseline baseline = breslow_baseline(design, Eigen::VectorXd::Zero(1), inst.weights);
    REQUIRE(baseline.increments.size() == 3);
    CHECK(baseline.increments.values()[0] == doctest::Approx(1.0 / 4.0));
    CHECK(baseline.increments.values()[1] == doctest::Approx(1.0 / 3.0));
    CHECK(baseline.increments.values()[2] == doctest::Approx(1.0 / 1.0));
    CHECK(baseline.cumulative.values()[2] ==
          doctest::Approx(1.0 / 4.0 + 1.0 / 3.0 + 1.0));
    CHECK(baseline.cumulative(0.5) == 0.0);
}

TEST_CASE("breslow hand instance with weights (0.5, 1, 1)") {
    oracle::Instance inst;
    inst.times = (Eigen::VectorXd(3) << 1.0, 2.0, 3.0).finished();
    inst.status = (Eigen::VectorXi(3) << 1, 1, 1).finished();
    inst.covariates = Eigen::MatrixXd::Zero(3, 1);
    inst.weights = (Eigen::VectorXd(3) << 0.5, 1.0, 1.0).finished();
    CoxDesign design = design_from(inst);
    BreslowBaseline baseline = breslow_baseline(design, Eigen::VectorXd::Zero(1), inst.weights);
    REQUIRE(baseline.increments.size() == 3);
    CHECK(baseline.increments.values()[0] == doctest::Approx(0.5 / 2.5));
    CHECK(baseline.increments.values()[1] == doctest::Approx(1.0 / 2.0));
    CHECK(baseline.increments.values()[2] == doctest::Approx(1.0 / 1.0));
}

TEST_CASE("breslow zero-weight event keeps a zero increment") {
    oracle::Instance inst;
    inst.times = (Eigen::VectorXd(3) << 1.0, 2.0, 3.0).finished();
    inst.status = (Eigen::VectorXi(3) << 1, 1, 1).finished();
    inst.covariates = Eigen::MatrixXd::Zero(3, 1);
    inst.weights = (Eigen::VectorXd(3) << 1.0, 0.0, 1.0).finished();
    CoxDesign design = design_from(inst);
    BreslowBaseline baseline = breslow_baseline(design, Eigen::VectorXd::Zero(1), inst.weights);
    REQUIRE(baseline.increments.size() == 3);
    CHECK(baseline.increments.values()[1] == 0.0);
    CHECK(baseline.increments.knot_index(2.0).has_value());
}

TEST_CASE("breslow matches the naive oracle on weighted random instances") {
    for (std::uint64_t seed : {101ULL, 102ULL, 103ULL}) {
        oracle::Instance inst = oracle::random_instance(14, 2, 0.3, seed, false);
        CoxDesign design = design_from(inst);
        const Eigen::VectorXd beta = (Eigen::VectorXd(2) << 0.25, -0.5).finished();
        BreslowBaseline baseline = breslow_baseline(design, beta, inst.weights);
        oracle::NaiveBaseline naive = oracle::naive_breslow(inst, beta);
        REQUIRE(baseline.increments.size() == naive.times.size());
        for (std::size_t k = 0; k < naive.times.size(); ++k) {
            CHECK(baseline.increments.knots()[k] == naive.times[k]);
            CHECK(baseline.increments.values()[k] == doctest::Approx(naive.increments[k]).epsilon(1e-12));
            CHECK(baseline.cumulative.values()[k] == doctest::Approx(naive.cumulative[k]).epsilon(1e-12));
        }
    }
}

TEST_CASE("monotone likelihood is flagged, not fatal") {
    // Perfectly separating covariate on a tiny scale: the likelihood keeps
    // rising along beta, so the iterates blow past the |beta| > 50 guard
    // long before the gradient flattens out.
    oracle::Instance inst;
    inst.times = (Eigen::VectorXd(6) << 1, 2, 3, 10, 11, 12).finished();
    inst.status = (Eigen::VectorXi(6) << 1, 1, 1, 1, 1, 1).finished();
    inst.covariates = (Eigen::MatrixXd(6, 1) << 0.01, 0.01, 0.01, 0, 0, 0).finished();
    inst.weights = Eigen::VectorXd::Ones(6);
    CoxDesign design = design_from(inst);
    CoxOptions options;
    options.max_iter = 200;
    WeightedCoxFit fit = fit_weighted_cox(design, inst.weights, options);
    CHECK(fit.monotone_likelihood);
    CHECK(fit.beta.allFinite());
    CHECK(std::isfinite(fit.log_partial_lik));
}
