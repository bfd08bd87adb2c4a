#pragma once
// Experiment drivers: random instance generation and CSV emission for
// the bound-comparison, confidence-bound, knapsack and SVM studies at
// desk scale.  All runners are deterministic functions of (seed, config);
// realizations are distributed over a worker pool with one RNG substream
// per realization and rows emitted in index order.

#include <cstdint>
#include <string>
#include <vector>

#include "ccb/rng.hpp"
#include "ccb/sum_spec.hpp"

namespace ccb {

struct ExperimentConfig {
    std::uint64_t seed = 1;
    int realizations = 1;
    int n = 10;
    std::vector<double> tau_grid = {0.2, 0.1, 0.05, 0.02, 0.01, 0.005};
    std::string out_dir;     // when non-empty, runners also write <name>.csv there
    std::string experiment;  // fig2 | fig3 | table3 | svm2d | svm-wisconsin | mgf-chain
    double eps_t = 1e-6;
    double eps_alpha = 1e-6;

    // knapsack (table3)
    std::string instance_dir;  // optional: text instances; otherwise generated
    std::vector<int> table3_sizes = {100, 200, 500};
    double tau = 0.03;
    double mip_gap = 1e-5;
    double time_limit = 120.0;  // seconds per solve

    // svm
    std::string data_file;  // svm-wisconsin: dataset csv
    std::vector<double> splits = {0.2, 0.8};
    double svm_c = 100.0;
    double svm_tau = 0.02;

    int threads = 0;  // 0 = hardware concurrency

    static ExperimentConfig from_json(const std::string& text);
};

struct Table1Draw {
    SumSpec spec;
    double alpha = 0.0;
};

// One random instance following the comparison-study sampling rules:
// E[X_k] ~ U(0,1), a_k ~ U(-1,0), b_k ~ U(0,1), sigma_k ~ U(0,(b_k-a_k)/2),
// alpha ~ U(0, b_bar).  Draw order is fixed (mean, a, b, sigma per term,
// then alpha) so streams reproduce across implementations.
Table1Draw gen_table1_spec(Rng& rng, int n);

// Runners return the CSV text (header + rows, '\n' line ends).
std::string run_fig2(const ExperimentConfig& cfg);
std::string run_fig3(const ExperimentConfig& cfg);
std::string run_table3(const ExperimentConfig& cfg);
std::string run_svm(const ExperimentConfig& cfg);
std::string run_mgf_chain(const ExperimentConfig& cfg);

// Dispatch on cfg.experiment; also writes the file when out_dir is set.
std::string run_experiment(const ExperimentConfig& cfg);

}  // namespace ccb
