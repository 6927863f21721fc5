#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sqnkit/dataset.hpp"
#include "sqnkit/dlbfgs.hpp"
#include "sqnkit/kernels.hpp"
#include "sqnkit/oracle.hpp"
#include "sqnkit/rng.hpp"

namespace sqnkit {

class SigmoidSvmProblem;

// ---------------------------------------------------------------- schedules

enum class ScheduleKind { diminishing, constant, decaying };

/// Step sizes alpha_k, k >= 1.
///   diminishing: base / k
///   constant:    base
///   decaying:   kappa_low / (L * kappa_up^2) * k^-beta, beta in (0.5, 1)
struct StepSchedule {
    ScheduleKind kind = ScheduleKind::diminishing;
    double base = 10.0;
    double beta = 0.75;
    double kappa_low = 0.0;
    double kappa_up = 0.0;
    double lipschitz = 0.0;

    double alpha(std::uint64_t k) const;
    /// Throws ScheduleError when the fields do not define a valid schedule.
    void validate() const;

    friend bool operator==(const StepSchedule&, const StepSchedule&) = default;
};

/// Probability mass of the randomly returned iterate for step sizes `alphas`
/// (alphas[k-1] = alpha_k). Throws ScheduleError naming the offending k when a
/// step exceeds 2*kappa_low/(L*kappa_up^2) or no step is strictly below it.
std::vector<double> random_output_pmf(std::span<const double> alphas, double kappa_low,
                                      double kappa_up, double lipschitz);

/// 0-based index drawn from `pmf` by inverse CDF on one uniform draw.
std::size_t random_output_index(std::span<const double> pmf, rng::Stream& stream);

Vector select_random_output(std::span<const Vector> iterates, std::span<const double> pmf,
                            rng::Stream& stream);

struct BatchPlan {
    std::uint64_t total_sfo_calls = 0; // N_bar
    std::uint64_t batch_size = 0;      // m
};

/// Total SFO budget and batch size that guarantee E||grad f(x_R)||^2 <= epsilon
/// with constant steps kappa_low / (L kappa_up^2).
BatchPlan corollary34_batch_size(double epsilon, double sigma, double lipschitz,
                                 double kappa_low, double kappa_up, double d_f,
                                 double d_tilde);

struct VrParameters {
    double alpha = 0.0;
    std::uint64_t inner = 0;
};

/// alpha = mu0 * m / (L * kappa_up * T^{2/3}), q = floor(T / (3 * mu0 * m)).
VrParameters vr_parameters(std::uint64_t dataset_size, std::uint64_t batch_size,
                                  double kappa_up, double lipschitz, double mu0);

// ------------------------------------------------------------------- config

struct SolverConfig {
    std::size_t batch_size = 100;
    std::size_t memory = 10;
    double delta = dlbfgs::kDefaultDelta;
    StepSchedule schedule;
    std::uint64_t max_iters = 1000;
    std::uint64_t seed = 1;
    std::uint64_t eval_every = 10;
    /// gamma used for H_1 = gamma^{-1} I before any curvature pair exists.
    double initial_gamma = 1.0;
    /// H_k = I throughout: plain SGD (sqn_run) or SVRG (sdlbfgs_vr_run).
    bool identity_operator = false;
    SamplingPolicy sampling = SamplingPolicy::without_replacement;
    kernels::Policy kernel_policy = kernels::Policy::serial;
    double divergence_threshold = 1e8;
    bool keep_iterates = false;

    // Variance-reduced runs.
    std::uint64_t epochs = 10;
    std::uint64_t inner = 0; // 0 -> floor(T / m)
    double vr_alpha = 0.1;
    /// Curvature pairs from the previous batch re-evaluated at the new point
    /// (extra m SFO calls) instead of reusing the VR gradients.
    bool vr_reevaluate = false;

    /// Throws ArgumentError on invalid settings.
    void validate() const;

    friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

// -------------------------------------------------------------------- trace

struct EvalMetrics {
    double sng = 0.0;
    double objective = 0.0;
    double accuracy = 0.0;
};

struct TraceRecord {
    std::uint64_t iteration = 0;
    double alpha = 0.0;
    double sng = 0.0;
    double objective = 0.0;
    double accuracy = 0.0;
    std::uint64_t sfo_total = 0;
    bool damped_step = false;
    bool negative_curvature = false;
    std::uint64_t damped_steps = 0;
    std::uint64_t negative_curvature_steps = 0;
    double wall_time = 0.0;
};

struct RunTrace {
    std::vector<TraceRecord> records;
    Vector final_x;
    /// Iterates at which gradients were taken (x_1..x_N, or all inner iterates).
    std::vector<Vector> iterates;
    std::vector<double> alphas;
    SfoCounter counter;
    bool diverged = false;
    std::string message;
    std::uint64_t iterations = 0;
    std::uint64_t damped_steps = 0;
    std::uint64_t negative_curvature_steps = 0;
    std::uint64_t skipped_pairs = 0;
    std::uint64_t rejected_pairs = 0;
    /// Uniformly drawn inner iterate (variance-reduced runs only).
    std::optional<Vector> random_output;
    std::optional<std::uint64_t> random_output_index;
};

using Evaluator = std::function<EvalMetrics(std::span<const double>)>;
using TraceHook = std::function<void(const TraceRecord&)>;

struct RunHooks {
    Evaluator evaluate;     // required
    TraceHook on_record;    // optional
    std::ostream* memory_dump = nullptr; // optional, one line per iteration
};

/// Evaluator computing SNG, objective and accuracy on `evalset`.
Evaluator make_evaluator(const LabeledDataset& evalset, double lambda,
                         kernels::Policy policy = kernels::Policy::serial);

// ------------------------------------------------------------------ solvers

/// Stochastic quasi-Newton iteration x_{k+1} = x_k - alpha_k H_k g_k with the
/// damped L-BFGS operator (or H_k = I when identity_operator is set).
RunTrace sqn_run(const FiniteSumProblem& problem, const SolverConfig& config,
                 std::span<const double> x1, const RunHooks& hooks);

RunTrace sqn_run(const SigmoidSvmProblem& problem, const SolverConfig& config,
                 const LabeledDataset& evalset, std::span<const double> x1);

/// grad f_K(x_t) - grad f_K(x_tilde) + grad f(x_tilde); counter += 2m.
Vector vr_gradient(const FiniteSumProblem& problem, std::span<const double> x_t,
                   std::span<const double> x_tilde, std::span<const double> full_grad_tilde,
                   const BatchIndices& batch, SfoCounter& counter);

/// Damped L-BFGS with SVRG-style variance reduction and a constant step.
RunTrace sdlbfgs_vr_run(const FiniteSumProblem& problem, const SolverConfig& config,
                        std::span<const double> x0, const RunHooks& hooks);

RunTrace sdlbfgs_vr_run(const SigmoidSvmProblem& problem, const SolverConfig& config,
                        const LabeledDataset& evalset, std::span<const double> x0);

} // namespace sqnkit
