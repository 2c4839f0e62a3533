// dualcox: fit the two-component semi-supervised Cox mixture, classify the
// control arm, run simulation studies, and export KM / time-dependent ROC
// diagnostics. All outputs are deterministic given the run manifest.

#include "dualcox/cox.hpp"
#include "dualcox/csv.hpp"
#include "dualcox/data.hpp"
#include "dualcox/em.hpp"
#include "dualcox/error.hpp"
#include "dualcox/metrics.hpp"
#include "dualcox/simulation.hpp"
#include "dualcox/survival.hpp"
#include "dualcox/version.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace dualcox;

constexpr int kExitSuccess = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitInput = 2;

bool is_input_error(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonPositiveTime:
        case ErrorCode::MissingResponseOnLabeled:
        case ErrorCode::ResponsePresentOnUnlabeled:
        case ErrorCode::NonFiniteCovariate:
        case ErrorCode::DimensionMismatch:
        case ErrorCode::EmptyInput:
        case ErrorCode::InvalidInput:
            return true;
        default:
            return false;
    }
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t hash = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    return hash;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::InvalidInput, "cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::InvalidInput, "cannot write '" + path + "'");
    out << content;
}

struct Manifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> options;
    std::vector<std::pair<std::string, std::uint64_t>> input_digests;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

    void add_option(const std::string& key, const std::string& value) {
        options.emplace_back(key, value);
    }
    void add_input(const std::string& path, const std::string& bytes) {
        input_digests.emplace_back(path, fnv1a64(bytes));
    }

    std::string render() const {
        std::ostringstream out;
        out << "tool = dualcox " << DUALCOX_VERSION << "\n";
        out << "command = " << command << "\n";
        for (const auto& [key, value] : options) out << key << " = " << value << "\n";
        for (const auto& [path, digest] : input_digests) {
            char hex[32];
            std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(digest));
            out << "input " << path << " = fnv1a64:" << hex << "\n";
        }
        const auto elapsed =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
        out << "duration_ms = " << elapsed.count() << "\n";
        return out.str();
    }
};

struct FitFlags {
    std::string init = "pi-prior";
    int restarts = 1;
    std::uint64_t seed = 1;
    double abstol = 1e-5;
    double reltol = 1e-7;
    int max_iter = 1000;
    std::string convergence = "and";
};

void add_fit_flags(CLI::App* cmd, FitFlags& flags) {
    cmd->add_option("--init", flags.init, "Initialization: pi-prior, random, or boundary")
        ->check(CLI::IsMember({"pi-prior", "random", "boundary"}));
    cmd->add_option("--restarts", flags.restarts, "Independent EM restarts (best kept)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", flags.seed, "Base RNG seed (DUALCOX_SEED overrides)");
    cmd->add_option("--abstol", flags.abstol, "Absolute log-likelihood tolerance");
    cmd->add_option("--reltol", flags.reltol, "Relative log-likelihood tolerance");
    cmd->add_option("--max-iter", flags.max_iter, "Maximum EM iterations")->check(CLI::PositiveNumber);
    cmd->add_option("--convergence", flags.convergence,
                    "and = both criteria on the observed log-likelihood; "
                    "or-compat = either criterion on the complete-data quantity")
        ->check(CLI::IsMember({"and", "or-compat"}));
}

EmOptions make_em_options(const FitFlags& flags) {
    EmOptions options;
    if (flags.init == "random") options.init_method = InitMethod::uniform_random;
    else if (flags.init == "boundary") options.init_method = InitMethod::boundary_bernoulli;
    else options.init_method = InitMethod::pi_prior;
    options.restarts = flags.restarts;
    options.seed = flags.seed;
    if (const char* env = std::getenv("DUALCOX_SEED")) {
        options.seed = std::strtoull(env, nullptr, 10);
    }
    options.abstol = flags.abstol;
    options.reltol = flags.reltol;
    options.max_em_iter = flags.max_iter;
    options.convergence =
        flags.convergence == "or-compat" ? ConvergenceRule::or_compat : ConvergenceRule::and_observed;
    return options;
}

void record_fit_flags(Manifest& manifest, const FitFlags& flags, const EmOptions& options) {
    manifest.add_option("init", flags.init);
    manifest.add_option("restarts", std::to_string(flags.restarts));
    manifest.add_option("seed", std::to_string(options.seed));
    manifest.add_option("abstol", format_double(flags.abstol));
    manifest.add_option("reltol", format_double(flags.reltol));
    manifest.add_option("max_iter", std::to_string(flags.max_iter));
    manifest.add_option("convergence", flags.convergence);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// ---------------------------------------------------------------------------
// fit

int run_fit(const std::string& data_path, const std::string& covariate_list,
            const std::string& out_prefix, const FitFlags& flags) {
    Manifest manifest;
    manifest.command = "fit";
    const std::string bytes = read_file(data_path);
    manifest.add_input(data_path, bytes);

    std::istringstream stream(bytes);
    TrialCsv csv = read_trial_csv(stream, split_list(covariate_list));
    TrialDataset data = validate_dataset(csv.rows, csv.covariate_names);

    EmOptions options = make_em_options(flags);
    manifest.add_option("data", data_path);
    manifest.add_option("covariates",
                        covariate_list.empty() ? std::string("(all)") : covariate_list);
    record_fit_flags(manifest, flags, options);

    FitReport report = fit_dual_cox(data, options);

    // pooled comparison fit over the whole population
    CoxDesign design(data);
    WeightedCoxFit pooled = fit_weighted_cox(design, Eigen::VectorXd::Ones(data.n()), options.cox);

    // estimates.csv
    std::string estimates = "component,covariate,beta,se,hazard_ratio,wald_p\n";
    auto emit_fit = [&](const std::string& component, const WeightedCoxFit& fit) {
        for (int j = 0; j < data.p(); ++j) {
            estimates += component + "," + csv_escape(data.covariate_names()[static_cast<std::size_t>(j)]) +
                         "," + format_double(fit.beta(j)) + "," + format_double(fit.std_errors(j)) +
                         "," + format_double(fit.hazard_ratios(j)) + "," +
                         format_double(fit.wald_p(j)) + "\n";
        }
    };
    emit_fit("responder", report.component_fits[0]);
    emit_fit("non_responder", report.component_fits[1]);
    emit_fit("pooled", pooled);
    write_file(out_prefix + ".estimates.csv", estimates);

    // memberships.csv
    std::string memberships = "id,u1,u2,class\n";
    for (int i = 0; i < data.n(); ++i) {
        int label;
        if (data.is_labeled(i)) {
            label = data.response(i);
        } else {
            label = report.memberships(i, 1) >= report.memberships(i, 2) ? 1 : 2;
        }
        memberships += csv_escape(data.ids()[static_cast<std::size_t>(i)]) + "," +
                       format_double(report.memberships(i, 1)) + "," +
                       format_double(report.memberships(i, 2)) + "," + std::to_string(label) + "\n";
    }
    write_file(out_prefix + ".memberships.csv", memberships);

    // model.csv
    std::string model = "key,value\n";
    model += "pi_1," + format_double(report.model.pi[0]) + "\n";
    model += "pi_2," + format_double(report.model.pi[1]) + "\n";
    model += "observed_loglik," + format_double(report.observed_loglik) + "\n";
    model += "iterations," + std::to_string(report.trace.iterations) + "\n";
    model += "convergence," + std::string(convergence_reason_name(report.trace.reason)) + "\n";
    model += "control_response_rate," + format_double(report.control_response_rate) + "\n";
    model += "restart_index," + std::to_string(report.restart_index) + "\n";
    model += "n," + std::to_string(data.n()) + "\n";
    model += "n_labeled," + std::to_string(data.n_labeled()) + "\n";
    model += "n_unlabeled," + std::to_string(data.n_unlabeled()) + "\n";
    write_file(out_prefix + ".model.csv", model);

    // summary.txt
    std::ostringstream summary;
    const DatasetCounts counts = data.counts();
    summary << "dualcox fit (" << DUALCOX_VERSION << ")\n";
    summary << "data: " << data_path << "\n";
    summary << "n = " << counts.n << " (labeled " << counts.n_labeled << ", unlabeled "
            << counts.n_unlabeled << "), censoring rate " << format_double(counts.censoring_rate)
            << "\n";
    if (data.has_tied_event_times()) {
        summary << "note: tied event times present; Breslow tie handling in effect\n";
    }
    summary << "\nmixing probabilities: pi_1 = " << format_double(report.model.pi[0])
            << ", pi_2 = " << format_double(report.model.pi[1]) << "\n";
    summary << "control-arm response rate: " << format_double(report.control_response_rate) << "\n";
    summary << "iterations: " << report.trace.iterations << " ("
            << convergence_reason_name(report.trace.reason) << ")";
    if (report.trace.reason == ConvergenceReason::max_iterations) {
        summary << "  ** warning: EM iterations reached max-iter **";
    }
    summary << "\nobserved log-likelihood: " << format_double(report.observed_loglik) << "\n";

    auto emit_table = [&](const std::string& title, const WeightedCoxFit& fit) {
        summary << "\n" << title << "\n";
        summary << "  covariate        beta          se          HR      wald_p\n";
        for (int j = 0; j < data.p(); ++j) {
            char line[160];
            std::snprintf(line, sizeof(line), "  %-12s %10.4f  %10.4f  %10.4f  %10.2e",
                          data.covariate_names()[static_cast<std::size_t>(j)].c_str(), fit.beta(j),
                          fit.std_errors(j), fit.hazard_ratios(j), fit.wald_p(j));
            summary << line << "\n";
        }
    };
    emit_table("responders (component 1)", report.component_fits[0]);
    emit_table("non-responders (component 2)", report.component_fits[1]);
    emit_table("overall population (pooled Cox)", pooled);

    summary << "\nlog-likelihood trail (last 10):\n";
    const std::size_t start =
        report.trace.records.size() > 10 ? report.trace.records.size() - 10 : 0;
    for (std::size_t i = start; i < report.trace.records.size(); ++i) {
        const EmIterationRecord& r = report.trace.records[i];
        summary << "  iter " << r.iteration << ": " << format_double(r.observed_loglik) << "\n";
    }
    write_file(out_prefix + ".summary.txt", summary.str());

    write_file(out_prefix + ".manifest.txt", manifest.render());
    std::cout << "fit complete: pi_1 = " << format_double(report.model.pi[0]) << ", "
              << report.trace.iterations << " iterations, outputs at " << out_prefix << ".*\n";
    return kExitSuccess;
}

// ---------------------------------------------------------------------------
// simulate

int run_simulate(const std::string& config_path, int reps_override, const std::string& out_path,
                 int threads, const FitFlags& flags, bool seed_given) {
    Manifest manifest;
    manifest.command = "simulate";
    const std::string config_bytes = read_file(config_path);
    manifest.add_input(config_path, config_bytes);

    SimConfig config = parse_sim_config(config_bytes);
    if (reps_override > 0) config.replications = reps_override;
    EmOptions options = make_em_options(flags);
    if (seed_given || std::getenv("DUALCOX_SEED") != nullptr) config.seed = options.seed;

    manifest.add_option("config", config_path);
    manifest.add_option("replications", std::to_string(config.replications));
    manifest.add_option("threads", std::to_string(threads));
    manifest.add_option("sim_seed", std::to_string(config.seed));
    record_fit_flags(manifest, flags, options);

    ReplicationSummary summary = run_replications(config, options, threads);
    write_file(out_path, replication_summary_csv(summary));
    write_file(out_path + ".manifest.txt", manifest.render());

    for (const std::string& note : summary.failure_notes) std::cerr << "warning: " << note << "\n";
    std::cout << "simulate complete: " << summary.replications_completed << " replicates, accuracy "
              << format_double(summary.accuracy_mean) << " (sd "
              << format_double(summary.accuracy_sd) << "), censoring "
              << format_double(summary.censoring_mean) << ", summary at " << out_path << "\n";
    return kExitSuccess;
}

// ---------------------------------------------------------------------------
// roc

int run_roc(const std::string& data_path, const std::string& memberships_path,
            const std::string& times_list, const std::string& covariate_list,
            const std::string& out_prefix) {
    Manifest manifest;
    manifest.command = "roc";
    const std::string data_bytes = read_file(data_path);
    manifest.add_input(data_path, data_bytes);
    const std::string member_bytes = read_file(memberships_path);
    manifest.add_input(memberships_path, member_bytes);
    manifest.add_option("data", data_path);
    manifest.add_option("memberships", memberships_path);
    manifest.add_option("times", times_list);

    std::istringstream stream(data_bytes);
    TrialCsv csv = read_trial_csv(stream, split_list(covariate_list));
    TrialDataset data = validate_dataset(csv.rows, csv.covariate_names);

    // memberships.csv: id,u1,u2,class — class drives the subgroup split.
    std::istringstream member_stream(member_bytes);
    const auto table = read_csv_table(member_stream);
    if (table.empty() || table[0] != std::vector<std::string>{"id", "u1", "u2", "class"}) {
        throw Error(ErrorCode::InvalidInput, "memberships file must have header id,u1,u2,class");
    }
    std::map<std::string, int> class_by_id;
    for (std::size_t r = 1; r < table.size(); ++r) {
        if (table[r].size() != 4) {
            throw Error(ErrorCode::InvalidInput,
                        "line " + std::to_string(r + 1) + ": expected 4 fields");
        }
        class_by_id[table[r][0]] = std::stoi(table[r][3]);
    }

    std::vector<double> times_grid;
    for (const std::string& t : split_list(times_list)) times_grid.push_back(std::stod(t));
    if (times_grid.empty()) throw Error(ErrorCode::InvalidInput, "no evaluation times given");

    // Subgroups: responders / non-responders by membership class, pooled
    // over everyone; a plain Cox fit per group supplies the marker.
    std::vector<int> group_of(static_cast<std::size_t>(data.n()), 0);
    for (int i = 0; i < data.n(); ++i) {
        const auto it = class_by_id.find(data.ids()[static_cast<std::size_t>(i)]);
        if (it == class_by_id.end()) {
            throw Error(ErrorCode::InvalidInput,
                        "membership file lacks id '" + data.ids()[static_cast<std::size_t>(i)] + "'");
        }
        group_of[static_cast<std::size_t>(i)] = it->second;
    }

    std::string roc_csv = "group,t,threshold,sensitivity,one_minus_specificity\n";
    std::string auc_csv = "group,t,auc\n";
    const std::vector<std::string> group_names = {"responders", "non_responders", "pooled"};
    for (int g = 0; g < 3; ++g) {
        std::vector<int> rows;
        for (int i = 0; i < data.n(); ++i) {
            if (g == 2 || group_of[static_cast<std::size_t>(i)] == g + 1) rows.push_back(i);
        }
        if (rows.size() < 2) {
            std::cerr << "warning: group " << group_names[static_cast<std::size_t>(g)]
                      << " has fewer than 2 subjects; skipped\n";
            continue;
        }
        Eigen::VectorXd times(static_cast<Eigen::Index>(rows.size()));
        Eigen::VectorXi status(static_cast<Eigen::Index>(rows.size()));
        Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), data.p());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            times(static_cast<Eigen::Index>(r)) = data.times()(rows[r]);
            status(static_cast<Eigen::Index>(r)) = data.status()(rows[r]);
            x.row(static_cast<Eigen::Index>(r)) = data.covariates().row(rows[r]);
        }
        CoxDesign design(times, status, x);
        WeightedCoxFit fit =
            fit_weighted_cox(design, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(rows.size())));
        const Eigen::VectorXd lp = x * fit.beta;
        std::vector<double> times_vec(times.data(), times.data() + times.size());
        std::vector<double> lp_vec(lp.data(), lp.data() + lp.size());

        for (double t : times_grid) {
            try {
                RocCurveAtTime curve = roc_at_time(t, times_vec, lp_vec);
                for (std::size_t i = 0; i < curve.thresholds.size(); ++i) {
                    roc_csv += group_names[static_cast<std::size_t>(g)] + "," + format_double(t) + "," +
                               format_double(curve.thresholds[i]) + "," +
                               format_double(curve.sensitivity[i]) + "," +
                               format_double(curve.one_minus_specificity[i]) + "\n";
                }
                auc_csv += group_names[static_cast<std::size_t>(g)] + "," + format_double(t) + "," +
                           format_double(curve.auc) + "\n";
            } catch (const Error& e) {
                std::cerr << "warning: group " << group_names[static_cast<std::size_t>(g)] << " at t="
                          << format_double(t) << " omitted: " << e.what() << "\n";
            }
        }
    }
    write_file(out_prefix + ".roc.csv", roc_csv);
    write_file(out_prefix + ".auc.csv", auc_csv);
    write_file(out_prefix + ".manifest.txt", manifest.render());
    std::cout << "roc complete: outputs at " << out_prefix << ".*\n";
    return kExitSuccess;
}

// ---------------------------------------------------------------------------
// km

int run_km(const std::string& data_path, const std::string& group_column,
           const std::string& covariate_list, const std::string& out_prefix) {
    Manifest manifest;
    manifest.command = "km";
    const std::string bytes = read_file(data_path);
    manifest.add_input(data_path, bytes);
    manifest.add_option("data", data_path);
    manifest.add_option("group", group_column);

    std::istringstream stream(bytes);
    const auto table = read_csv_table(stream);
    if (table.empty()) throw Error(ErrorCode::InvalidInput, "line 1: empty file, header required");
    const std::vector<std::string>& header = table[0];
    auto column_index = [&](const std::string& name) -> std::size_t {
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (header[j] == name) return j;
        }
        throw Error(ErrorCode::InvalidInput, "line 1: no column named '" + name + "'");
    };
    const std::size_t time_col = column_index("time");
    const std::size_t status_col = column_index("status");
    const std::size_t group_col = column_index(group_column);

    std::map<std::string, std::pair<std::vector<double>, std::vector<int>>> groups;
    int skipped_blank = 0;
    for (std::size_t r = 1; r < table.size(); ++r) {
        if (table[r].size() != header.size()) {
            throw Error(ErrorCode::InvalidInput, "line " + std::to_string(r + 1) + ": expected " +
                                                     std::to_string(header.size()) + " fields");
        }
        const std::string& key = table[r][group_col];
        if (key.empty()) {
            ++skipped_blank;
            continue;
        }
        try {
            groups[key].first.push_back(std::stod(table[r][time_col]));
            groups[key].second.push_back(std::stoi(table[r][status_col]));
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidInput,
                        "line " + std::to_string(r + 1) + ": bad time/status value");
        }
    }
    if (skipped_blank > 0) {
        std::cerr << "warning: " << skipped_blank << " row(s) with blank '" << group_column
                  << "' excluded\n";
    }
    if (groups.empty() || groups.size() > 2) {
        throw Error(ErrorCode::InvalidInput, "group column must take 1 or 2 distinct values, got " +
                                                 std::to_string(groups.size()));
    }

    std::string km_csv = "group,time,survival\n";
    for (const auto& [key, g] : groups) {
        StepFunction s = kaplan_meier(g.first, g.second);
        km_csv += csv_escape(key) + ",0," + format_double(s.value_before_first()) + "\n";
        for (std::size_t k = 0; k < s.size(); ++k) {
            km_csv += csv_escape(key) + "," + format_double(s.knots()[k]) + "," +
                      format_double(s.values()[k]) + "\n";
        }
    }
    write_file(out_prefix + ".km.csv", km_csv);

    std::ostringstream summary;
    summary << "dualcox km (" << DUALCOX_VERSION << ")\n";
    summary << "group column: " << group_column << "\n";
    for (const auto& [key, g] : groups) {
        int events = 0;
        for (int s : g.second) events += s;
        summary << "group " << key << ": n = " << g.first.size() << ", events = " << events << "\n";
    }
    if (groups.size() == 2) {
        auto it = groups.begin();
        const auto& a = it->second;
        ++it;
        const auto& b = it->second;
        LogrankResult lr = logrank_test(a.first, a.second, b.first, b.second);
        summary << "log-rank statistic = " << format_double(lr.statistic)
                << ", p = " << format_double(lr.p_value) << "\n";
        std::cout << "log-rank p = " << format_double(lr.p_value) << "\n";
    }
    write_file(out_prefix + ".km_summary.txt", summary.str());
    write_file(out_prefix + ".manifest.txt", manifest.render());
    std::cout << "km complete: outputs at " << out_prefix << ".*\n";
    return kExitSuccess;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dual Cox model: semi-supervised mixture of Cox proportional-hazards models"};
    app.set_version_flag("--version", DUALCOX_VERSION);
    app.require_subcommand(1);

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "Fit the Dual Cox model to a trial CSV");
    std::string fit_data, fit_covariates, fit_prefix;
    FitFlags fit_flags;
    fit_cmd->add_option("--data", fit_data, "Input CSV (id,time,status,arm,response,covariates...)")
        ->required();
    fit_cmd->add_option("--covariates", fit_covariates,
                        "Comma-separated covariate columns (default: all)");
    fit_cmd->add_option("--out-prefix", fit_prefix, "Prefix for output files")->required();
    add_fit_flags(fit_cmd, fit_flags);

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Run a replication study from a config file");
    std::string sim_config, sim_out;
    int sim_reps = 0;
    int sim_threads = 1;
    FitFlags sim_flags;
    sim_cmd->add_option("--config", sim_config, "Key=value simulation config")->required();
    sim_cmd->add_option("--out", sim_out, "Summary CSV path")->required();
    sim_cmd->add_option("--reps", sim_reps, "Override the configured replication count");
    sim_cmd->add_option("--threads", sim_threads, "Worker cap (output is thread-count independent)")
        ->check(CLI::PositiveNumber);
    add_fit_flags(sim_cmd, sim_flags);

    // roc
    auto* roc_cmd = app.add_subcommand("roc", "Time-dependent ROC/AUC per classified subgroup");
    std::string roc_data, roc_memberships, roc_times, roc_covariates, roc_prefix;
    roc_cmd->add_option("--data", roc_data, "Input CSV")->required();
    roc_cmd->add_option("--memberships", roc_memberships, "memberships.csv from `dualcox fit`")
        ->required();
    roc_cmd->add_option("--times", roc_times, "Comma-separated evaluation times")->required();
    roc_cmd->add_option("--covariates", roc_covariates,
                        "Comma-separated covariate columns (default: all)");
    roc_cmd->add_option("--out-prefix", roc_prefix, "Prefix for output files")->required();

    // km
    auto* km_cmd = app.add_subcommand("km", "Kaplan-Meier curves and the two-group log-rank test");
    std::string km_data, km_group, km_covariates, km_prefix;
    km_cmd->add_option("--data", km_data, "Input CSV")->required();
    km_cmd->add_option("--group-col", km_group, "Column defining the groups (e.g. arm)")->required();
    km_cmd->add_option("--out-prefix", km_prefix, "Prefix for output files")->required();
    (void)km_covariates;

    bool sim_seed_given = false;
    try {
        app.parse(argc, argv);
        sim_seed_given = sim_cmd->count("--seed") > 0;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (app.got_subcommand(fit_cmd)) {
            return run_fit(fit_data, fit_covariates, fit_prefix, fit_flags);
        }
        if (app.got_subcommand(sim_cmd)) {
            return run_simulate(sim_config, sim_reps, sim_out, sim_threads, sim_flags, sim_seed_given);
        }
        if (app.got_subcommand(roc_cmd)) {
            return run_roc(roc_data, roc_memberships, roc_times, roc_covariates, roc_prefix);
        }
        if (app.got_subcommand(km_cmd)) {
            return run_km(km_data, km_group, km_covariates, km_prefix);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return is_input_error(e.code()) ? kExitInput : kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitInput;
}
