#include "dualcox/cox.hpp"
#include "dualcox/data.hpp"
#include "dualcox/em.hpp"
#include "dualcox/error.hpp"
#include "dualcox/metrics.hpp"
#include "dualcox/simulation.hpp"
#include "dualcox/survival.hpp"
#include "dualcox/version.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace dualcox;

namespace {

TrialDataset dataset_from_arrays(const std::vector<double>& times, const std::vector<int>& status,
                                 const Eigen::MatrixXd& covariates, const std::vector<int>& labeled,
                                 const std::vector<int>& response) {
    const std::size_t n = times.size();
    if (status.size() != n || static_cast<std::size_t>(covariates.rows()) != n ||
        labeled.size() != n || response.size() != n) {
        throw Error(ErrorCode::DimensionMismatch, "input arrays differ in length");
    }
    std::vector<SurvivalSample> samples(n);
    for (std::size_t i = 0; i < n; ++i) {
        samples[i].time = times[i];
        samples[i].status = status[i];
        samples[i].covariates.resize(static_cast<std::size_t>(covariates.cols()));
        for (Eigen::Index j = 0; j < covariates.cols(); ++j) {
            samples[i].covariates[static_cast<std::size_t>(j)] =
                covariates(static_cast<Eigen::Index>(i), j);
        }
        samples[i].arm = labeled[i] != 0 ? Arm::labeled : Arm::unlabeled;
        if (labeled[i] != 0) samples[i].response = response[i];
    }
    std::vector<std::string> names;
    for (Eigen::Index j = 0; j < covariates.cols(); ++j) names.push_back("x" + std::to_string(j + 1));
    return TrialDataset(std::move(samples), std::move(names));
}

InitMethod init_from_name(const std::string& name) {
    if (name == "pi-prior" || name == "pi_prior") return InitMethod::pi_prior;
    if (name == "random" || name == "uniform") return InitMethod::uniform_random;
    if (name == "boundary") return InitMethod::boundary_bernoulli;
    throw Error(ErrorCode::InvalidInput, "unknown init method '" + name + "'");
}

py::dict cox_fit_to_dict(const WeightedCoxFit& fit) {
    py::dict out;
    out["beta"] = fit.beta;
    out["std_errors"] = fit.std_errors;
    out["hazard_ratios"] = fit.hazard_ratios;
    out["wald_p"] = fit.wald_p;
    out["log_partial_lik"] = fit.log_partial_lik;
    out["iterations"] = fit.iterations;
    out["converged"] = fit.converged;
    out["monotone_likelihood"] = fit.monotone_likelihood;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Dual Cox model: semi-supervised two-component Cox mixture";
    m.attr("__version__") = DUALCOX_VERSION;

    py::register_exception<Error>(m, "DualCoxError");

    m.def(
        "kaplan_meier",
        [](const std::vector<double>& times, const std::vector<int>& status) {
            const StepFunction s = kaplan_meier(times, status);
            return py::make_tuple(s.knots(), s.values());
        },
        py::arg("times"), py::arg("status"),
        "Kaplan-Meier curve; returns (event_times, survival_values).");

    m.def(
        "logrank_test",
        [](const std::vector<double>& times_a, const std::vector<int>& status_a,
           const std::vector<double>& times_b, const std::vector<int>& status_b) {
            const LogrankResult r = logrank_test(times_a, status_a, times_b, status_b);
            return py::make_tuple(r.statistic, r.p_value);
        },
        py::arg("times_a"), py::arg("status_a"), py::arg("times_b"), py::arg("status_b"),
        "Two-sample log-rank test; returns (statistic, p_value).");

    m.def(
        "fit_cox",
        [](const std::vector<double>& times, const std::vector<int>& status,
           const Eigen::MatrixXd& covariates, std::optional<Eigen::VectorXd> weights) {
            Eigen::VectorXd t(static_cast<Eigen::Index>(times.size()));
            Eigen::VectorXi d(static_cast<Eigen::Index>(status.size()));
            for (std::size_t i = 0; i < times.size(); ++i) {
                t(static_cast<Eigen::Index>(i)) = times[i];
                d(static_cast<Eigen::Index>(i)) = status[i];
            }
            CoxDesign design(t, d, covariates);
            const Eigen::VectorXd w =
                weights.has_value() ? *weights : Eigen::VectorXd::Ones(design.n());
            return cox_fit_to_dict(fit_weighted_cox(design, w));
        },
        py::arg("times"), py::arg("status"), py::arg("covariates"), py::arg("weights") = py::none(),
        "Weighted Cox proportional-hazards fit via Newton-Raphson.");

    m.def(
        "fit_dual_cox",
        [](const std::vector<double>& times, const std::vector<int>& status,
           const Eigen::MatrixXd& covariates, const std::vector<int>& labeled,
           const std::vector<int>& response, const std::string& init, int restarts,
           std::uint64_t seed, double abstol, double reltol, int max_iter,
           const std::string& convergence) {
            TrialDataset data = dataset_from_arrays(times, status, covariates, labeled, response);
            EmOptions options;
            options.init_method = init_from_name(init);
            options.restarts = restarts;
            options.seed = seed;
            options.abstol = abstol;
            options.reltol = reltol;
            options.max_em_iter = max_iter;
            options.convergence = convergence == "or-compat" ? ConvergenceRule::or_compat
                                                             : ConvergenceRule::and_observed;
            const FitReport report = fit_dual_cox(data, options);

            py::dict out;
            out["pi"] = report.model.pi;
            out["beta1"] = report.model.beta[0];
            out["beta2"] = report.model.beta[1];
            out["fit1"] = cox_fit_to_dict(report.component_fits[0]);
            out["fit2"] = cox_fit_to_dict(report.component_fits[1]);
            out["memberships"] = report.memberships.matrix();
            out["unlabeled_rows"] = report.unlabeled_rows;
            out["classifications"] = report.classifications;
            out["observed_loglik"] = report.observed_loglik;
            out["iterations"] = report.trace.iterations;
            out["converged"] = report.trace.reason != ConvergenceReason::max_iterations;
            out["convergence_reason"] = convergence_reason_name(report.trace.reason);
            out["control_response_rate"] = report.control_response_rate;
            std::vector<double> loglik_trail;
            for (const EmIterationRecord& r : report.trace.records)
                loglik_trail.push_back(r.observed_loglik);
            out["loglik_trail"] = loglik_trail;
            return out;
        },
        py::arg("times"), py::arg("status"), py::arg("covariates"), py::arg("labeled"),
        py::arg("response"), py::arg("init") = "pi-prior", py::arg("restarts") = 1,
        py::arg("seed") = 1, py::arg("abstol") = 1e-5, py::arg("reltol") = 1e-7,
        py::arg("max_iter") = 1000, py::arg("convergence") = "and",
        "SPIRLS-EM fit of the Dual Cox model; labeled rows carry response 1/2.");

    m.def(
        "generate_dataset",
        [](int n, double c, std::uint64_t seed, std::uint64_t replicate, double labeled_fraction) {
            SimConfig config;
            config.n = n;
            config.c = c;
            config.seed = seed;
            config.labeled_fraction = labeled_fraction;
            const GeneratedDataset generated = generate_dataset(config, replicate);
            py::dict out;
            out["times"] = generated.dataset.times();
            out["status"] = generated.dataset.status();
            out["covariates"] = generated.dataset.covariates();
            std::vector<int> labeled, response;
            for (int i = 0; i < generated.dataset.n(); ++i) {
                labeled.push_back(generated.dataset.is_labeled(i) ? 1 : 0);
                response.push_back(generated.dataset.response(i));
            }
            out["labeled"] = labeled;
            out["response"] = response;
            out["true_component"] = generated.true_component;
            out["censoring_rate"] = generated.censoring_rate;
            return out;
        },
        py::arg("n") = 1000, py::arg("c") = 6.5, py::arg("seed") = 1, py::arg("replicate") = 0,
        py::arg("labeled_fraction") = 0.5,
        "One replicate of the paper-style simulation design (Table 1 defaults).");

    m.def(
        "classification_accuracy",
        [](const std::vector<int>& predicted, const std::vector<int>& truth) {
            return classification_accuracy(predicted, truth);
        },
        py::arg("predicted"), py::arg("truth"));

    m.def(
        "roc_at_time",
        [](double t, const std::vector<double>& times, const std::vector<double>& linear_predictors) {
            const RocCurveAtTime curve = roc_at_time(t, times, linear_predictors);
            py::dict out;
            out["t"] = curve.t;
            out["thresholds"] = curve.thresholds;
            out["sensitivity"] = curve.sensitivity;
            out["one_minus_specificity"] = curve.one_minus_specificity;
            out["auc"] = curve.auc;
            return out;
        },
        py::arg("t"), py::arg("times"), py::arg("linear_predictors"),
        "Incident/dynamic ROC curve at time t with the linear predictor as marker.");

    m.def(
        "auc_over_times",
        [](const std::vector<double>& grid, const std::vector<double>& times,
           const std::vector<double>& linear_predictors) {
            const AucOverTimes result = auc_over_times(grid, times, linear_predictors);
            std::vector<std::pair<double, double>> points;
            for (const AucPoint& p : result.points) points.emplace_back(p.t, p.auc);
            return py::make_tuple(points, result.omitted_times);
        },
        py::arg("grid"), py::arg("times"), py::arg("linear_predictors"));
}
