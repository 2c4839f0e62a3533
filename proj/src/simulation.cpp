#include "dualcox/simulation.hpp"

#include "dualcox/csv.hpp"
#include "dualcox/error.hpp"
#include "dualcox/metrics.hpp"
#include "dualcox/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <thread>

namespace dualcox {

double survival_time_from_uniform(double u, double linear_predictor, double scale) {
    return -scale * std::log(u) / std::exp(linear_predictor);
}

GeneratedDataset generate_dataset(const SimConfig& config, std::uint64_t replicate_index) {
    if (config.n < 4) throw Error(ErrorCode::InvalidInput, "simulation needs n >= 4");
    if (config.beta1_true.size() != 4 || config.beta2_true.size() != 4) {
        throw Error(ErrorCode::DimensionMismatch, "the generator uses exactly 4 covariates");
    }
    if (!(config.scale > 0.0) || !std::isfinite(config.c)) {
        throw Error(ErrorCode::InvalidInput, "scale must be positive and c finite");
    }

    SplitMix64 rng(substream_seed(config.seed, replicate_index));
    const int n = config.n;
    const int n_component1 = static_cast<int>(std::lround(config.pi_true[0] * n));

    // Covariates row by row: two Bernoulli(0.5), then two standard normals.
    Eigen::MatrixXd x(n, 4);
    for (int i = 0; i < n; ++i) {
        x(i, 0) = rng.bernoulli(0.5) ? 1.0 : 0.0;
        x(i, 1) = rng.bernoulli(0.5) ? 1.0 : 0.0;
        x(i, 2) = rng.normal();
        x(i, 3) = rng.normal();
    }

    std::vector<double> true_event_time(static_cast<std::size_t>(n));
    std::vector<int> true_component(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int component = i < n_component1 ? 1 : 2;
        true_component[static_cast<std::size_t>(i)] = component;
        const Eigen::VectorXd& beta = component == 1 ? config.beta1_true : config.beta2_true;
        const double lp = x.row(i).dot(beta);
        true_event_time[static_cast<std::size_t>(i)] =
            survival_time_from_uniform(rng.uniform01(), lp, config.scale);
    }

    const double censor_max = std::exp(config.c);
    std::vector<double> censoring_time(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) censoring_time[static_cast<std::size_t>(i)] = rng.uniform01() * censor_max;

    // Uniformly random labeled half via partial Fisher-Yates.
    const int n_labeled = static_cast<int>(std::lround(config.labeled_fraction * n));
    std::vector<int> permutation(static_cast<std::size_t>(n));
    std::iota(permutation.begin(), permutation.end(), 0);
    for (int i = 0; i < n_labeled; ++i) {
        const int j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - i)));
        std::swap(permutation[static_cast<std::size_t>(i)], permutation[static_cast<std::size_t>(j)]);
    }
    std::vector<std::uint8_t> labeled(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n_labeled; ++i) {
        labeled[static_cast<std::size_t>(permutation[static_cast<std::size_t>(i)])] = 1;
    }

    std::vector<SurvivalSample> samples(static_cast<std::size_t>(n));
    int censored = 0;
    for (int i = 0; i < n; ++i) {
        SurvivalSample& s = samples[static_cast<std::size_t>(i)];
        const double t_event = true_event_time[static_cast<std::size_t>(i)];
        const double t_censor = censoring_time[static_cast<std::size_t>(i)];
        s.time = std::min(t_event, t_censor);
        s.status = t_event <= t_censor ? 1 : 0;
        censored += 1 - s.status;
        s.covariates = {x(i, 0), x(i, 1), x(i, 2), x(i, 3)};
        if (labeled[static_cast<std::size_t>(i)]) {
            s.arm = Arm::labeled;
            s.response = true_component[static_cast<std::size_t>(i)];
        } else {
            s.arm = Arm::unlabeled;
        }
    }

    GeneratedDataset generated{
        TrialDataset(std::move(samples), {"x1", "x2", "x3", "x4"}),
        std::move(true_component),
        std::move(true_event_time),
        std::move(censoring_time),
        static_cast<double>(censored) / n,
    };
    return generated;
}

namespace {

struct ReplicateResult {
    bool ok = false;
    std::string note;
    std::array<double, 4> beta1{};
    std::array<double, 4> beta2{};
    double pi1 = 0.0;
    double accuracy = 0.0;
    double censoring_rate = 0.0;
    int iterations = 0;
};

ReplicateResult run_one_replicate(const SimConfig& config, const EmOptions& fit_options,
                                  std::uint64_t replicate_index) {
    ReplicateResult result;
    try {
        GeneratedDataset generated = generate_dataset(config, replicate_index);
        result.censoring_rate = generated.censoring_rate;

        EmOptions options = fit_options;
        // The fit seed is the first substream of the replicate's data seed.
        options.seed = substream_seed(substream_seed(config.seed, replicate_index), 0);
        FitReport report = fit_dual_cox(generated.dataset, options);

        std::vector<int> truth;
        truth.reserve(report.unlabeled_rows.size());
        for (int row : report.unlabeled_rows)
            truth.push_back(generated.true_component[static_cast<std::size_t>(row)]);
        double accuracy = classification_accuracy(report.classifications, truth);

        // Mixture labels are exchangeable under random initialization:
        // align by swapping when the fit matches the flipped truth better.
        bool swapped = false;
        if (accuracy < 0.5) {
            swapped = true;
            accuracy = 1.0 - accuracy;
        }
        const Eigen::VectorXd& b1 = report.model.beta[swapped ? 1 : 0];
        const Eigen::VectorXd& b2 = report.model.beta[swapped ? 0 : 1];
        for (int j = 0; j < 4; ++j) {
            result.beta1[static_cast<std::size_t>(j)] = b1(j);
            result.beta2[static_cast<std::size_t>(j)] = b2(j);
        }
        result.pi1 = swapped ? report.model.pi[1] : report.model.pi[0];
        result.accuracy = accuracy;
        result.iterations = report.trace.iterations;
        result.ok = true;
    } catch (const Error& e) {
        result.note = "replicate " + std::to_string(replicate_index) + ": " + e.what();
    }
    return result;
}

// bias_stats needs two estimates for its SD; a single-replicate study still
// has a defined mean and bias, so handle that case here.
ParameterStats make_stats(const std::string& name, std::span<const double> estimates, double truth) {
    ParameterStats out;
    out.name = name;
    out.truth = truth;
    if (estimates.size() == 1) {
        out.mean = estimates[0];
        out.sd = std::numeric_limits<double>::quiet_NaN();
        out.bias = out.mean - truth;
        out.relative_bias_defined = truth != 0.0;
        out.relative_bias = out.relative_bias_defined ? out.bias / truth : 0.0;
        return out;
    }
    const BiasStats stats = bias_stats(estimates, truth);
    out.mean = stats.mean;
    out.sd = stats.sd;
    out.bias = stats.bias;
    out.relative_bias = stats.relative_bias;
    out.relative_bias_defined = stats.relative_bias_defined;
    return out;
}

}  // namespace

ReplicationSummary run_replications(const SimConfig& config, const EmOptions& fit_options,
                                    int threads) {
    if (config.replications < 1) {
        throw Error(ErrorCode::InvalidInput, "replications must be >= 1");
    }
    const int reps = config.replications;
    std::vector<ReplicateResult> results(static_cast<std::size_t>(reps));

    const int workers = std::max(1, std::min(threads, reps));
    if (workers == 1) {
        for (int r = 0; r < reps; ++r) {
            results[static_cast<std::size_t>(r)] =
                run_one_replicate(config, fit_options, static_cast<std::uint64_t>(r));
        }
    } else {
        // Results land in a fixed slot per replicate; aggregation below is
        // sequential, so the summary is identical for any worker count.
        std::atomic<int> next{0};
        auto work = [&]() {
            while (true) {
                const int r = next.fetch_add(1);
                if (r >= reps) break;
                results[static_cast<std::size_t>(r)] =
                    run_one_replicate(config, fit_options, static_cast<std::uint64_t>(r));
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }

    ReplicationSummary summary;
    std::array<std::vector<double>, 4> beta1_samples;
    std::array<std::vector<double>, 4> beta2_samples;
    std::vector<double> pi1_samples;
    std::vector<double> accuracy_samples;
    for (int r = 0; r < reps; ++r) {
        const ReplicateResult& result = results[static_cast<std::size_t>(r)];
        if (!result.ok) {
            ++summary.replications_failed;
            summary.failure_notes.push_back(result.note);
            continue;
        }
        ++summary.replications_completed;
        for (int j = 0; j < 4; ++j) {
            beta1_samples[static_cast<std::size_t>(j)].push_back(result.beta1[static_cast<std::size_t>(j)]);
            beta2_samples[static_cast<std::size_t>(j)].push_back(result.beta2[static_cast<std::size_t>(j)]);
        }
        pi1_samples.push_back(result.pi1);
        accuracy_samples.push_back(result.accuracy);

        summary.censoring_mean += result.censoring_rate;
        summary.iterations_mean += result.iterations;
        if (summary.replications_completed == 1) {
            summary.censoring_min = summary.censoring_max = result.censoring_rate;
            summary.iterations_min = summary.iterations_max = result.iterations;
        } else {
            summary.censoring_min = std::min(summary.censoring_min, result.censoring_rate);
            summary.censoring_max = std::max(summary.censoring_max, result.censoring_rate);
            summary.iterations_min = std::min(summary.iterations_min, result.iterations);
            summary.iterations_max = std::max(summary.iterations_max, result.iterations);
        }
    }
    if (summary.replications_completed == 0) {
        throw Error(ErrorCode::InvalidInput, "every replicate failed; first note: " +
                                                 (summary.failure_notes.empty()
                                                      ? std::string("none")
                                                      : summary.failure_notes.front()));
    }
    summary.censoring_mean /= summary.replications_completed;
    summary.iterations_mean /= summary.replications_completed;

    for (int j = 0; j < 4; ++j) {
        summary.parameters.push_back(make_stats("beta_1" + std::to_string(j + 1),
                                                beta1_samples[static_cast<std::size_t>(j)],
                                                config.beta1_true(j)));
    }
    for (int j = 0; j < 4; ++j) {
        summary.parameters.push_back(make_stats("beta_2" + std::to_string(j + 1),
                                                beta2_samples[static_cast<std::size_t>(j)],
                                                config.beta2_true(j)));
    }
    summary.parameters.push_back(make_stats("pi_1", pi1_samples, config.pi_true[0]));

    const ParameterStats accuracy = make_stats("accuracy", accuracy_samples, 0.0);
    summary.accuracy_mean = accuracy.mean;
    summary.accuracy_sd = accuracy.sd;
    return summary;
}

double mean_censoring_rate(const SimConfig& config, double c, int reps) {
    SimConfig adjusted = config;
    adjusted.c = c;
    double total = 0.0;
    for (int r = 0; r < reps; ++r) {
        total += generate_dataset(adjusted, static_cast<std::uint64_t>(r)).censoring_rate;
    }
    return total / reps;
}

double calibrate_censoring(const SimConfig& config, double target_rate, int reps) {
    if (!(target_rate > 0.0) || !(target_rate < 1.0)) {
        throw Error(ErrorCode::InvalidInput, "target censoring rate must be in (0,1)");
    }
    // The mean censoring rate decreases in c; bracket generously.
    double lo = -5.0;
    double hi = 25.0;
    for (int iter = 0; iter < 60; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double rate = mean_censoring_rate(config, mid, reps);
        if (std::abs(rate - target_rate) <= 0.01) return mid;
        if (rate > target_rate) {
            lo = mid;  // too much censoring: raise c
        } else {
            hi = mid;
        }
    }
    throw Error(ErrorCode::BisectionFailed,
                "no c within +-1% of target after 60 bisection steps");
}

namespace {

std::vector<double> parse_double_list(const std::string& value, int line) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidInput,
                        "line " + std::to_string(line) + ": bad numeric list entry '" + item + "'");
        }
    }
    return out;
}

}  // namespace

SimConfig parse_sim_config(const std::string& text) {
    SimConfig config;
    std::stringstream ss(text);
    std::string line;
    int line_number = 0;
    while (std::getline(ss, line)) {
        ++line_number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos) {
                throw Error(ErrorCode::InvalidInput,
                            "line " + std::to_string(line_number) + ": expected key = value");
            }
            continue;
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::vector<double> numbers = parse_double_list(value, line_number);
        auto expect = [&](std::size_t count) {
            if (numbers.size() != count) {
                throw Error(ErrorCode::InvalidInput, "line " + std::to_string(line_number) + ": key '" +
                                                         key + "' expects " + std::to_string(count) +
                                                         " value(s)");
            }
        };
        if (key == "n") {
            expect(1);
            config.n = static_cast<int>(numbers[0]);
        } else if (key == "pi_true") {
            expect(2);
            config.pi_true = {numbers[0], numbers[1]};
        } else if (key == "beta1_true") {
            expect(4);
            config.beta1_true = Eigen::Map<const Eigen::VectorXd>(numbers.data(), 4);
        } else if (key == "beta2_true") {
            expect(4);
            config.beta2_true = Eigen::Map<const Eigen::VectorXd>(numbers.data(), 4);
        } else if (key == "scale") {
            expect(1);
            config.scale = numbers[0];
        } else if (key == "c") {
            expect(1);
            config.c = numbers[0];
        } else if (key == "labeled_fraction") {
            expect(1);
            config.labeled_fraction = numbers[0];
        } else if (key == "seed") {
            expect(1);
            config.seed = static_cast<std::uint64_t>(numbers[0]);
        } else if (key == "replications") {
            expect(1);
            config.replications = static_cast<int>(numbers[0]);
        } else {
            throw Error(ErrorCode::InvalidInput,
                        "line " + std::to_string(line_number) + ": unknown key '" + key + "'");
        }
    }
    return config;
}

std::string format_sim_config(const SimConfig& config) {
    std::string out;
    out += "n = " + std::to_string(config.n) + "\n";
    out += "pi_true = " + format_double(config.pi_true[0]) + "," + format_double(config.pi_true[1]) + "\n";
    auto vec = [](const Eigen::VectorXd& v) {
        std::string s;
        for (Eigen::Index j = 0; j < v.size(); ++j) {
            if (j > 0) s += ",";
            s += format_double(v(j));
        }
        return s;
    };
    out += "beta1_true = " + vec(config.beta1_true) + "\n";
    out += "beta2_true = " + vec(config.beta2_true) + "\n";
    out += "scale = " + format_double(config.scale) + "\n";
    out += "c = " + format_double(config.c) + "\n";
    out += "labeled_fraction = " + format_double(config.labeled_fraction) + "\n";
    out += "seed = " + std::to_string(config.seed) + "\n";
    out += "replications = " + std::to_string(config.replications) + "\n";
    return out;
}

std::string replication_summary_csv(const ReplicationSummary& summary) {
    auto sd_field = [](double sd) { return std::isnan(sd) ? std::string("NA") : format_double(sd); };
    std::string out = "name,mean,sd,bias,relative_bias\n";
    for (const ParameterStats& stats : summary.parameters) {
        out += stats.name + "," + format_double(stats.mean) + "," + sd_field(stats.sd) + "," +
               format_double(stats.bias) + ",";
        out += stats.relative_bias_defined ? format_double(stats.relative_bias) : "NA";
        out += "\n";
    }
    out += "accuracy," + format_double(summary.accuracy_mean) + "," + sd_field(summary.accuracy_sd) +
           ",,\n";
    out += "censoring_rate," + format_double(summary.censoring_mean) + ",,,\n";
    out += "censoring_rate_min," + format_double(summary.censoring_min) + ",,,\n";
    out += "censoring_rate_max," + format_double(summary.censoring_max) + ",,,\n";
    out += "em_iterations," + format_double(summary.iterations_mean) + ",,,\n";
    out += "em_iterations_min," + std::to_string(summary.iterations_min) + ",,,\n";
    out += "em_iterations_max," + std::to_string(summary.iterations_max) + ",,,\n";
    out += "replications_completed," + std::to_string(summary.replications_completed) + ",,,\n";
    out += "replications_failed," + std::to_string(summary.replications_failed) + ",,,\n";
    return out;
}

}  // namespace dualcox
