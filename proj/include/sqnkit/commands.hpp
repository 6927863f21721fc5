#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sqnkit/config.hpp"
#include "sqnkit/problems.hpp"

namespace sqnkit::harness {

enum ExitCode : int {
    exit_ok = 0,
    exit_config_error = 2,
    exit_data_error = 3,
    exit_all_diverged = 4,
};

/// Command-line values that take precedence over the config file.
struct Overrides {
    std::vector<std::uint64_t> seeds;
    std::optional<std::string> out;
    std::vector<std::string> algorithms;
    std::optional<std::uint64_t> eval_every;
};

/// `algorithms` selects configured sections by name; a name that is not
/// configured but is a known type is added with default settings.
ExperimentConfig apply_overrides(ExperimentConfig config, const Overrides& overrides);

struct Datasets {
    std::shared_ptr<const LabeledDataset> train;
    std::shared_ptr<const LabeledDataset> test;
};

std::filesystem::path train_file(const ExperimentConfig& config);
std::filesystem::path test_file(const ExperimentConfig& config);

/// Writes train/test files, the planted separator and a metadata sidecar
/// (synthetic source), or a deterministic train/test split (file source).
void cmd_generate(const ExperimentConfig& config);

/// Reads the datasets named by the config. Throws IoError if missing.
Datasets load_datasets(const ExperimentConfig& config);

struct RunOutcome {
    std::string algorithm;
    std::string type;
    std::uint64_t seed = 0;
    std::string status; // ok | diverged | error
    RunTrace trace;
    EvalMetrics final_metrics;
    std::optional<std::uint64_t> random_output_index;
    std::optional<double> random_output_sng;
    std::string message;
};

/// One (algorithm, seed) run on the given data.
RunOutcome execute_run(const AlgorithmSpec& algorithm, std::uint64_t seed,
                       const ExperimentConfig& config, const Datasets& data,
                       kernels::Policy policy, std::ostream* memory_dump = nullptr);

/// SGD with step 1/t and batch 20 for `iterations` steps from x0.
Vector warm_start(const SigmoidSvmProblem& problem, std::span<const double> x0,
                  std::uint64_t seed, std::uint64_t iterations, kernels::Policy policy);

std::string trace_filename(const std::string& algorithm, std::uint64_t seed);

inline constexpr const char* kSummaryHeader =
    "algorithm,type,seed,status,iterations,sfo_total,final_sng,final_objective,final_accuracy,"
    "damped_steps,negative_curvature_steps,skipped_pairs,rejected_pairs,random_output_index,"
    "random_output_sng,message";

inline constexpr const char* kCompareHeader =
    "algorithm,seed,iteration,sfo_total,sng,accuracy,objective";

/// Worker-pool size: SQNKIT_THREADS if set and positive, else `runs`.
std::size_t worker_count(std::size_t runs);

/// Runs every (algorithm, seed) pair, writes one trace CSV per run and
/// summary.csv. Returns exit_all_diverged when no run finished normally.
int cmd_run(const ExperimentConfig& config, std::ostream& log);

/// Long-format CSV (compare.csv) joining all traces named by the config.
void cmd_compare(const ExperimentConfig& config);

} // namespace sqnkit::harness
