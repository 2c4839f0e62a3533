#include "dualcox/simulation.hpp"

#include "dualcox/error.hpp"
#include "oracles.hpp"

#include "doctest.h"

#include <cmath>

using namespace dualcox;

TEST_CASE("survival time inversion hand value") {
    // U = e^{-1}, lp = 0, scale 35 -> T = 35
    CHECK(survival_time_from_uniform(std::exp(-1.0), 0.0, 35.0) == doctest::Approx(35.0));
}

TEST_CASE("component sizes are deterministic round(n*pi)") {
    SimConfig config;
    config.n = 1000;
    GeneratedDataset generated = generate_dataset(config, 0);
    int first = 0;
    for (int i = 0; i < 1000; ++i) first += generated.true_component[static_cast<std::size_t>(i)] == 1;
    CHECK(first == 300);
    for (int i = 0; i < 300; ++i) CHECK(generated.true_component[static_cast<std::size_t>(i)] == 1);

    config.n = 85;  // rounding case: 85 * 0.3 = 25.5 -> 26
    GeneratedDataset odd = generate_dataset(config, 0);
    int count = 0;
    for (int v : odd.true_component) count += v == 1;
    CHECK(count == 26);
}

TEST_CASE("labeled half carries the true labels, the rest is blank") {
    SimConfig config;
    config.n = 200;
    GeneratedDataset generated = generate_dataset(config, 2);
    const TrialDataset& data = generated.dataset;
    CHECK(data.n_labeled() == 100);
    for (int i = 0; i < data.n(); ++i) {
        if (data.is_labeled(i)) {
            CHECK(data.response(i) == generated.true_component[static_cast<std::size_t>(i)]);
        } else {
            CHECK(data.response(i) == 0);
        }
    }
}

TEST_CASE("same seed and replicate give a bit-identical dataset") {
    SimConfig config;
    config.n = 150;
    config.seed = 8;
    GeneratedDataset a = generate_dataset(config, 5);
    GeneratedDataset b = generate_dataset(config, 5);
    CHECK(a.dataset.times() == b.dataset.times());
    CHECK(a.dataset.covariates() == b.dataset.covariates());
    CHECK(a.censoring_rate == b.censoring_rate);

    GeneratedDataset c = generate_dataset(config, 6);
    CHECK(a.dataset.times() != c.dataset.times());
}

TEST_CASE("transformed survival times are unit exponential (KS at alpha 0.01)") {
    // T * exp(x'beta_k) / scale = -log(U) ~ Exp(1), regardless of x.
    SimConfig config;
    config.n = 1000;
    config.seed = 17;
    std::vector<double> draws;
    for (std::uint64_t rep = 0; rep < 10; ++rep) {
        GeneratedDataset generated = generate_dataset(config, rep);
        for (int i = 0; i < config.n; ++i) {
            const int k = generated.true_component[static_cast<std::size_t>(i)];
            const Eigen::VectorXd& beta = k == 1 ? config.beta1_true : config.beta2_true;
            const double lp = generated.dataset.covariates().row(i).dot(beta);
            draws.push_back(generated.true_event_time[static_cast<std::size_t>(i)] *
                            std::exp(lp) / config.scale);
        }
    }
    const double d = oracle::ks_statistic_exp1(draws);
    // critical value c(0.01)/sqrt(n) with c(0.01) = 1.628
    CHECK(d < 1.628 / std::sqrt(static_cast<double>(draws.size())));
}

TEST_CASE("censoring rate decreases in c") {
    SimConfig config;
    config.n = 400;
    config.seed = 3;
    double previous = 1.1;
    for (double c : {2.0, 4.0, 6.0, 8.0, 10.0}) {
        const double rate = mean_censoring_rate(config, c, 30);
        CHECK(rate < previous);
        previous = rate;
    }
}

TEST_CASE("calibration lands near the paper's censoring constants") {
    SimConfig config;
    config.n = 500;
    config.seed = 21;
    const double c20 = calibrate_censoring(config, 0.20, 40);
    CHECK(c20 == doctest::Approx(6.5).epsilon(0.5 / 6.5));
    const double c05 = calibrate_censoring(config, 0.05, 40);
    CHECK(c05 == doctest::Approx(9.5).epsilon(0.5 / 9.5));
    const double c45 = calibrate_censoring(config, 0.45, 40);
    CHECK(c45 == doctest::Approx(3.8).epsilon(0.5 / 3.8));
}

TEST_CASE("config round trip") {
    SimConfig config;
    config.n = 321;
    config.c = 4.25;
    config.seed = 99;
    config.replications = 12;
    SimConfig parsed = parse_sim_config(format_sim_config(config));
    CHECK(parsed.n == config.n);
    CHECK(parsed.c == config.c);
    CHECK(parsed.seed == config.seed);
    CHECK(parsed.replications == config.replications);
    CHECK(parsed.beta1_true == config.beta1_true);
    CHECK(parsed.pi_true[1] == config.pi_true[1]);
}

TEST_CASE("config rejects unknown keys with a line number") {
    CHECK_THROWS_WITH_AS(parse_sim_config("n = 100\nbogus = 1\n"),
                         doctest::Contains("line 2"), Error);
}

TEST_CASE("one-replicate summaries are deterministic") {
    SimConfig config;
    config.n = 120;
    config.seed = 55;
    config.replications = 1;
    EmOptions options;
    ReplicationSummary a = run_replications(config, options);
    ReplicationSummary b = run_replications(config, options);
    CHECK(replication_summary_csv(a) == replication_summary_csv(b));
    CHECK(a.replications_completed == 1);
    CHECK(a.replications_failed == 0);
}

TEST_CASE("worker count does not change the summary") {
    SimConfig config;
    config.n = 120;
    config.seed = 56;
    config.replications = 6;
    EmOptions options;
    ReplicationSummary serial = run_replications(config, options, 1);
    ReplicationSummary threaded = run_replications(config, options, 4);
    CHECK(replication_summary_csv(serial) == replication_summary_csv(threaded));
}
