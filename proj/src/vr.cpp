#include <chrono>

#include "sqnkit/errors.hpp"
#include "sqnkit/problems.hpp"
#include "sqnkit/solvers.hpp"

namespace sqnkit {

Vector vr_gradient(const FiniteSumProblem& problem, std::span<const double> x_t,
                   std::span<const double> x_tilde, std::span<const double> full_grad_tilde,
                   const BatchIndices& batch, SfoCounter& counter)
{
    num::require_same_size(full_grad_tilde.size(), problem.dim(), "vr_gradient");
    const Vector at_x = oracle::batch_gradient(problem, x_t, batch, counter);
    const Vector at_anchor = oracle::batch_gradient(problem, x_tilde, batch, counter);
    Vector g(at_x.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = (at_x[i] - at_anchor[i]) + full_grad_tilde[i];
    return g;
}

RunTrace sdlbfgs_vr_run(const FiniteSumProblem& problem, const SolverConfig& config,
                        std::span<const double> x0, const RunHooks& hooks)
{
    config.validate();
    if (!hooks.evaluate) throw ArgumentError("sdlbfgs_vr_run: an evaluator is required");
    num::require_same_size(x0.size(), problem.dim(), "sdlbfgs_vr_run initial point");
    num::require_finite(x0, "sdlbfgs_vr_run initial point");

    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t inner =
        config.inner > 0 ? config.inner : problem.size() / config.batch_size;
    if (inner == 0) throw ArgumentError("sdlbfgs_vr_run: inner loop length is zero");
    const std::uint64_t total_inner = config.epochs * inner;
    const double alpha = config.vr_alpha;

    RunTrace trace;
    dlbfgs::LbfgsMemory memory(config.identity_operator ? 0 : config.memory, config.delta,
                               config.initial_gamma);

    rng::Stream output_stream(config.seed, "vr-output");
    const std::uint64_t output_index = output_stream.uniform_int(total_inner);
    trace.random_output_index = output_index;

    Vector x_tilde(x0.begin(), x0.end());
    Vector x = x_tilde;
    Vector x_prev, g_prev, batch_grad_prev;
    BatchIndices batch_prev;
    bool have_prev = false;
    bool step_damped = false;
    bool step_negative = false;

    auto emit = [&](std::uint64_t j, double a) {
        const EvalMetrics m = hooks.evaluate(x);
        TraceRecord r;
        r.iteration = j;
        r.alpha = a;
        r.sng = m.sng;
        r.objective = m.objective;
        r.accuracy = m.accuracy;
        r.sfo_total = trace.counter.total();
        r.damped_step = step_damped;
        r.negative_curvature = step_negative;
        r.damped_steps = trace.damped_steps;
        r.negative_curvature_steps = trace.negative_curvature_steps;
        r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        trace.records.push_back(r);
        if (hooks.on_record) hooks.on_record(r);
    };

    emit(0, 0.0);
    std::uint64_t j = 0;
    for (std::uint64_t epoch = 0; epoch < config.epochs && !trace.diverged; ++epoch) {
        trace.counter.begin_iteration();
        const Vector full_grad = oracle::full_gradient(problem, x_tilde, trace.counter);
        x = x_tilde;

        for (std::uint64_t t = 0; t < inner; ++t) {
            ++j;
            trace.counter.begin_iteration();
            rng::Stream stream(config.seed, "vr-batch", j);
            BatchIndices batch = oracle::sample_batch(stream, problem.size(), config.batch_size,
                                                      config.sampling, j);
            Vector batch_grad = oracle::batch_gradient(problem, x, batch, trace.counter);
            const Vector anchor_grad = oracle::batch_gradient(problem, x_tilde, batch, trace.counter);
            Vector g(batch_grad.size());
            for (std::size_t i = 0; i < g.size(); ++i) {
                g[i] = (batch_grad[i] - anchor_grad[i]) + full_grad[i];
            }

            step_damped = false;
            step_negative = false;
            if (!config.identity_operator && have_prev) {
                dlbfgs::UpdateEvent ev;
                if (config.vr_reevaluate) {
                    const Vector regrad =
                        oracle::batch_gradient_at(problem, x, batch_prev, trace.counter);
                    ev = dlbfgs::update(memory, x_prev, x, batch_grad_prev, regrad);
                } else {
                    ev = dlbfgs::update(memory, x_prev, x, g_prev, g);
                }
                if (ev.outcome == dlbfgs::UpdateOutcome::skipped_zero_step) ++trace.skipped_pairs;
                if (ev.outcome == dlbfgs::UpdateOutcome::rejected_large_rho) ++trace.rejected_pairs;
                if (ev.outcome != dlbfgs::UpdateOutcome::skipped_zero_step) {
                    step_damped = ev.damped;
                    step_negative = ev.negative_curvature;
                    trace.damped_steps += ev.damped ? 1 : 0;
                    trace.negative_curvature_steps += ev.negative_curvature ? 1 : 0;
                }
            }
            if (hooks.memory_dump) dlbfgs::dump_state(*hooks.memory_dump, memory, j);

            const double gamma = config.identity_operator ? 1.0 : memory.current_gamma();
            const Vector d = dlbfgs::two_loop_direction(memory, gamma, g);
            trace.alphas.push_back(alpha);
            if (config.keep_iterates) trace.iterates.push_back(x);
            if (j - 1 == output_index) trace.random_output = x;

            Vector x_next = x;
            bool diverged = false;
            try {
                num::axpy_inplace(-alpha, d, x_next);
                diverged = num::norm2(x_next) > config.divergence_threshold;
            } catch (const NumericError&) {
                diverged = true;
            }
            trace.iterations = j;
            if (diverged) {
                trace.diverged = true;
                trace.message = "iterate norm exceeded " +
                                std::to_string(config.divergence_threshold) +
                                " at inner iteration " + std::to_string(j);
                break;
            }

            x_prev = std::move(x);
            x = std::move(x_next);
            g_prev = std::move(g);
            batch_grad_prev = std::move(batch_grad);
            batch_prev = std::move(batch);
            have_prev = true;
            if (j % config.eval_every == 0 || j == total_inner) emit(j, alpha);
        }
        x_tilde = x;
    }
    trace.final_x = x;
    return trace;
}

RunTrace sdlbfgs_vr_run(const SigmoidSvmProblem& problem, const SolverConfig& config,
                        const LabeledDataset& evalset, std::span<const double> x0)
{
    RunHooks hooks;
    hooks.evaluate = make_evaluator(evalset, problem.lambda(), config.kernel_policy);
    return sdlbfgs_vr_run(static_cast<const FiniteSumProblem&>(problem), config, x0, hooks);
}

} // namespace sqnkit
