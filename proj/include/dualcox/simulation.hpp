#pragma once

#include "dualcox/data.hpp"
#include "dualcox/em.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dualcox {

// Monte-Carlo study configuration. Defaults reproduce the paper's design:
// a 30/70 responder split, four covariates (two Bernoulli(0.5), two
// standard normal), exponential survival times scaled by 35, and censoring
// drawn from Uniform(0, e^c).
struct SimConfig {
    int n = 1000;
    std::array<double, 2> pi_true{0.3, 0.7};
    Eigen::VectorXd beta1_true = (Eigen::VectorXd(4) << -1.0, 0.5, 3.0, 0.8).finished();
    Eigen::VectorXd beta2_true = (Eigen::VectorXd(4) << 2.0, -0.1, -3.0, 0.2).finished();
    double scale = 35.0;
    double c = 6.5;
    double labeled_fraction = 0.5;
    std::uint64_t seed = 1;
    int replications = 1000;
};

// Exponential draw via inversion: -scale * log(u) / exp(lp).
double survival_time_from_uniform(double u, double linear_predictor, double scale);

struct GeneratedDataset {
    TrialDataset dataset;
    std::vector<int> true_component;       // hidden truth, per row, in {1,2}
    std::vector<double> true_event_time;   // uncensored T_i
    std::vector<double> censoring_time;    // C_i
    double censoring_rate = 0.0;
};

// One replicate of the Table-1 design, fully deterministic given
// (config.seed, replicate_index). Draw order per replicate: the four
// covariates row by row (Bernoulli, Bernoulli, normal, normal), then one
// uniform per row for the survival time, then one per row for the
// censoring time, then the labeled-half selection by partial Fisher-Yates.
GeneratedDataset generate_dataset(const SimConfig& config, std::uint64_t replicate_index);

struct ParameterStats {
    std::string name;
    double truth = 0.0;
    double mean = 0.0;
    double sd = 0.0;
    double bias = 0.0;
    double relative_bias = 0.0;
    bool relative_bias_defined = true;
};

struct ReplicationSummary {
    std::vector<ParameterStats> parameters;  // beta_11..beta_24 then pi_1
    double accuracy_mean = 0.0;
    double accuracy_sd = 0.0;
    double censoring_mean = 0.0;
    double censoring_min = 0.0;
    double censoring_max = 0.0;
    double iterations_mean = 0.0;
    int iterations_min = 0;
    int iterations_max = 0;
    int replications_completed = 0;
    int replications_failed = 0;
    std::vector<std::string> failure_notes;
};

// Fits every replicate, scores classification accuracy on the unlabeled
// rows against the hidden truth (after label-swap alignment), and
// aggregates mean/SD/bias/relative-bias per parameter. Replicates run on
// independent substreams; aggregation order is fixed by replicate index,
// so the summary does not depend on the worker count.
ReplicationSummary run_replications(const SimConfig& config, const EmOptions& fit_options,
                                    int threads = 1);

// Mean censoring rate over `reps` fresh replicates at censoring constant c.
double mean_censoring_rate(const SimConfig& config, double c, int reps);

// Bisection on the mean simulated censoring rate; returns a c whose rate
// is within +-1 percentage point of the target.
double calibrate_censoring(const SimConfig& config, double target_rate, int reps);

// Flat key=value serialization; keys match the SimConfig field names,
// vector values are comma-separated.
SimConfig parse_sim_config(const std::string& text);
std::string format_sim_config(const SimConfig& config);

std::string replication_summary_csv(const ReplicationSummary& summary);

}  // namespace dualcox
