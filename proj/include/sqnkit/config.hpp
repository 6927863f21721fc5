#pragma once

// Experiment configuration file.
//
// Line-oriented "key = value" pairs grouped in sections. '#' starts a comment.
//
//   [problem]              source, n, train_count, test_count, density,
//                          data_seed, lambda, data_dir, train_path, test_path,
//                          split_fraction, init_scale
//   [run]                  seeds (comma separated), out, eval_every, dump_memory,
//                          warm_start
//   [algorithm <name>]     type (sgd | sdlbfgs | svrg | sdlbfgs-vr), batch, memory,
//                          delta, schedule (diminishing | constant | decaying),
//                          step, beta, kappa_low, kappa_up, lipschitz, iterations,
//                          initial_gamma, sampling (without | with), epochs, inner,
//                          vr_step, vr_reevaluate, random_output
//
// Algorithm sections may repeat with different names; their order is kept.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sqnkit/solvers.hpp"

namespace sqnkit::harness {

struct ProblemSpec {
    std::string source = "synthetic"; // synthetic | file
    std::size_t n = 500;
    std::size_t train_count = 10000;
    std::size_t test_count = 5000;
    double density = 0.05;
    std::uint64_t data_seed = 7;
    double lambda = 1e-4;
    std::string data_dir = "data";
    std::string train_path;
    std::string test_path;
    double split_fraction = 0.6;
    double init_scale = 5.0;

    friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

struct AlgorithmSpec {
    std::string name;
    std::string type;
    SolverConfig solver;
    /// Draw the returned iterate from the step-size pmf (needs kappa_low,
    /// kappa_up and lipschitz). Variance-reduced runs always draw uniformly.
    bool random_output = false;

    friend bool operator==(const AlgorithmSpec&, const AlgorithmSpec&) = default;
};

struct ExperimentConfig {
    ProblemSpec problem;
    std::vector<AlgorithmSpec> algorithms;
    std::vector<std::uint64_t> seeds{1};
    std::string out = "results";
    std::uint64_t eval_every = 10;
    bool dump_memory = false;
    /// SGD iterations (step 1/t, batch 20) run from the initial point before
    /// each algorithm starts; not counted in the trace.
    std::uint64_t warm_start = 0;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

bool is_known_algorithm_type(const std::string& type);

/// Default settings for an algorithm type (throws ConfigError if unknown).
AlgorithmSpec default_algorithm(const std::string& name, const std::string& type);

/// Throws ConfigError with the line number on malformed input.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

std::string serialize_config(const ExperimentConfig& config);

/// Semantic checks (at least one algorithm and seed, valid solver settings).
void validate_config(const ExperimentConfig& config);

} // namespace sqnkit::harness
