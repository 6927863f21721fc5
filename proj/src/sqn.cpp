#include <chrono>
#include <cmath>

#include "sqnkit/errors.hpp"
#include "sqnkit/problems.hpp"
#include "sqnkit/solvers.hpp"

namespace sqnkit {
namespace {

class Stopwatch {
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

} // namespace

Evaluator make_evaluator(const LabeledDataset& evalset, double lambda, kernels::Policy policy)
{
    return [&evalset, lambda, policy](std::span<const double> x) {
        EvalMetrics m;
        m.sng = problems::sng(x, evalset, lambda, policy);
        m.objective = problems::objective(x, evalset, lambda, policy);
        m.accuracy = problems::accuracy(x, evalset, policy);
        return m;
    };
}

RunTrace sqn_run(const FiniteSumProblem& problem, const SolverConfig& config,
                 std::span<const double> x1, const RunHooks& hooks)
{
    config.validate();
    if (!hooks.evaluate) throw ArgumentError("sqn_run: an evaluator is required");
    num::require_same_size(x1.size(), problem.dim(), "sqn_run initial point");
    num::require_finite(x1, "sqn_run initial point");

    const Stopwatch clock;
    RunTrace trace;
    dlbfgs::LbfgsMemory memory(config.identity_operator ? 0 : config.memory, config.delta,
                               config.initial_gamma);

    Vector x(x1.begin(), x1.end());
    Vector x_prev, g_prev;
    BatchIndices batch_prev;
    bool step_damped = false;
    bool step_negative = false;

    auto emit = [&](std::uint64_t k, double alpha) {
        const EvalMetrics m = hooks.evaluate(x);
        TraceRecord r;
        r.iteration = k;
        r.alpha = alpha;
        r.sng = m.sng;
        r.objective = m.objective;
        r.accuracy = m.accuracy;
        r.sfo_total = trace.counter.total();
        r.damped_step = step_damped;
        r.negative_curvature = step_negative;
        r.damped_steps = trace.damped_steps;
        r.negative_curvature_steps = trace.negative_curvature_steps;
        r.wall_time = clock.seconds();
        trace.records.push_back(r);
        if (hooks.on_record) hooks.on_record(r);
    };

    emit(0, 0.0);
    for (std::uint64_t k = 1; k <= config.max_iters; ++k) {
        trace.counter.begin_iteration();
        rng::Stream stream(config.seed, "batch", k);
        BatchIndices batch =
            oracle::sample_batch(stream, problem.size(), config.batch_size, config.sampling, k);
        Vector g = oracle::batch_gradient(problem, x, batch, trace.counter);

        step_damped = false;
        step_negative = false;
        if (!config.identity_operator && k > 1) {
            const Vector regrad = oracle::batch_gradient_at(problem, x, batch_prev, trace.counter);
            const auto ev = dlbfgs::update(memory, x_prev, x, g_prev, regrad);
            if (ev.outcome == dlbfgs::UpdateOutcome::skipped_zero_step) ++trace.skipped_pairs;
            if (ev.outcome == dlbfgs::UpdateOutcome::rejected_large_rho) ++trace.rejected_pairs;
            if (ev.outcome != dlbfgs::UpdateOutcome::skipped_zero_step) {
                step_damped = ev.damped;
                step_negative = ev.negative_curvature;
                trace.damped_steps += ev.damped ? 1 : 0;
                trace.negative_curvature_steps += ev.negative_curvature ? 1 : 0;
            }
        }
        if (hooks.memory_dump) dlbfgs::dump_state(*hooks.memory_dump, memory, k);

        const double gamma = config.identity_operator ? 1.0 : memory.current_gamma();
        const Vector d = dlbfgs::two_loop_direction(memory, gamma, g);
        const double alpha = config.schedule.alpha(k);
        trace.alphas.push_back(alpha);
        if (config.keep_iterates) trace.iterates.push_back(x);

        Vector x_next = x;
        bool diverged = false;
        try {
            num::axpy_inplace(-alpha, d, x_next);
            diverged = num::norm2(x_next) > config.divergence_threshold;
        } catch (const NumericError&) {
            diverged = true;
        }
        trace.iterations = k;
        if (diverged) {
            trace.diverged = true;
            trace.message = "iterate norm exceeded " +
                            std::to_string(config.divergence_threshold) + " at iteration " +
                            std::to_string(k);
            break;
        }

        x_prev = std::move(x);
        x = std::move(x_next);
        g_prev = std::move(g);
        batch_prev = std::move(batch);
        if (k % config.eval_every == 0 || k == config.max_iters) emit(k, alpha);
    }
    trace.final_x = x;
    return trace;
}

RunTrace sqn_run(const SigmoidSvmProblem& problem, const SolverConfig& config,
                 const LabeledDataset& evalset, std::span<const double> x1)
{
    RunHooks hooks;
    hooks.evaluate = make_evaluator(evalset, problem.lambda(), config.kernel_policy);
    return sqn_run(static_cast<const FiniteSumProblem&>(problem), config, x1, hooks);
}

} // namespace sqnkit
