#include <algorithm>
#include <cmath>
#include <string>

#include "sqnkit/errors.hpp"
#include "sqnkit/solvers.hpp"

namespace sqnkit {

double StepSchedule::alpha(std::uint64_t k) const
{
    if (k == 0) throw ScheduleError("step schedule: iterations are numbered from 1");
    const double kk = static_cast<double>(k);
    switch (kind) {
    case ScheduleKind::diminishing: return base / kk;
    case ScheduleKind::constant: return base;
    case ScheduleKind::decaying:
        return kappa_low / (lipschitz * kappa_up * kappa_up) * std::pow(kk, -beta);
    }
    throw ScheduleError("step schedule: unknown kind");
}

void StepSchedule::validate() const
{
    if (kind == ScheduleKind::decaying) {
        if (!(beta > 0.5 && beta < 1.0)) throw ScheduleError("decaying schedule: beta must lie in (0.5, 1)");
        if (!(kappa_low > 0.0 && kappa_up > 0.0 && lipschitz > 0.0)) {
            throw ScheduleError("decaying schedule: kappa_low, kappa_up and L must be positive");
        }
        return;
    }
    if (!(base > 0.0) || !std::isfinite(base)) throw ScheduleError("step schedule: base must be positive");
}

std::vector<double> random_output_pmf(std::span<const double> alphas, double kappa_low,
                                      double kappa_up, double lipschitz)
{
    if (alphas.empty()) throw ScheduleError("random_output_pmf: no iterations");
    if (!(kappa_low > 0.0 && kappa_up > 0.0 && lipschitz > 0.0)) {
        throw ScheduleError("random_output_pmf: kappa_low, kappa_up and L must be positive");
    }
    const double c = lipschitz * kappa_up * kappa_up;
    const double bound = 2.0 * kappa_low / c;
    bool strict = false;
    std::vector<double> w(alphas.size());
    for (std::size_t k = 0; k < alphas.size(); ++k) {
        const double a = alphas[k];
        if (!(a > 0.0) || a > bound) {
            throw ScheduleError("random_output_pmf: step alpha_" + std::to_string(k + 1) +
                                " outside (0, 2*kappa_low/(L*kappa_up^2)]");
        }
        if (a < bound) strict = true;
        w[k] = std::max(0.0, a * kappa_low - a * a * c / 2.0);
    }
    if (!strict) {
        throw ScheduleError("random_output_pmf: every step sits on the bound; alpha_1 must be smaller");
    }
    if (std::all_of(w.begin(), w.end(), [&](double v) { return v == w.front(); })) {
        // Equal steps: exactly uniform, without summation rounding.
        return std::vector<double>(w.size(), 1.0 / static_cast<double>(w.size()));
    }
    double total = 0.0;
    for (double v : w) total += v;
    if (!(total > 0.0)) throw ScheduleError("random_output_pmf: degenerate weights");
    for (auto& v : w) v /= total;
    return w;
}

std::size_t random_output_index(std::span<const double> pmf, rng::Stream& stream)
{
    if (pmf.empty()) throw ArgumentError("random_output_index: empty pmf");
    const double u = stream.uniform01();
    double cum = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t k = 0; k < pmf.size(); ++k) {
        if (pmf[k] > 0.0) last_positive = k;
        cum += pmf[k];
        if (u < cum && pmf[k] > 0.0) return k;
    }
    return last_positive;
}

Vector select_random_output(std::span<const Vector> iterates, std::span<const double> pmf,
                            rng::Stream& stream)
{
    if (iterates.size() != pmf.size()) {
        throw DimensionError("select_random_output: pmf and iterate counts differ");
    }
    return iterates[random_output_index(pmf, stream)];
}

BatchPlan corollary34_batch_size(double epsilon, double sigma, double lipschitz,
                                 double kappa_low, double kappa_up, double d_f,
                                 double d_tilde)
{
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw ArgumentError("corollary34_batch_size: epsilon must lie in (0, 1)");
    }
    if (!(sigma > 0.0 && lipschitz > 0.0 && kappa_low > 0.0 && kappa_up > 0.0 && d_f > 0.0 &&
          d_tilde > 0.0)) {
        throw ArgumentError("corollary34_batch_size: all constants must be positive");
    }
    const double ratio = kappa_up * kappa_up / (kappa_low * kappa_low);
    const double c1 = 4.0 * sigma * ratio * d_f / std::sqrt(d_tilde) +
                      sigma * lipschitz * std::sqrt(d_tilde);
    const double c2 = 4.0 * lipschitz * ratio * d_f;
    const double n_bar = std::ceil(std::max(c1 * c1 / (epsilon * epsilon) + 4.0 * c2 / epsilon,
                                            sigma * sigma / (lipschitz * lipschitz * d_tilde)));
    const double m = std::ceil(
        std::min(n_bar, std::max(1.0, sigma / lipschitz * std::sqrt(n_bar / d_tilde))));
    return {static_cast<std::uint64_t>(n_bar), static_cast<std::uint64_t>(m)};
}

VrParameters vr_parameters(std::uint64_t dataset_size, std::uint64_t batch_size,
                                  double kappa_up, double lipschitz, double mu0)
{
    if (dataset_size == 0 || batch_size == 0) {
        throw ArgumentError("vr_parameters: T and m must be positive");
    }
    if (!(mu0 > 0.0 && mu0 < 1.0)) throw ArgumentError("vr_parameters: mu0 must lie in (0, 1)");
    if (!(kappa_up > 0.0 && lipschitz > 0.0)) {
        throw ArgumentError("vr_parameters: kappa_up and L must be positive");
    }
    const double t = static_cast<double>(dataset_size);
    const double m = static_cast<double>(batch_size);
    VrParameters p;
    p.alpha = mu0 * m / (lipschitz * kappa_up * std::pow(t, 2.0 / 3.0));
    p.inner = static_cast<std::uint64_t>(std::floor(t / (3.0 * mu0 * m)));
    return p;
}

void SolverConfig::validate() const
{
    if (batch_size < 1) throw ArgumentError("config: batch size must be >= 1");
    if (max_iters < 1) throw ArgumentError("config: max_iters must be >= 1");
    if (eval_every < 1) throw ArgumentError("config: eval_every must be >= 1");
    if (!(delta > 0.0)) throw ArgumentError("config: delta must be positive");
    if (!(initial_gamma > 0.0)) throw ArgumentError("config: initial gamma must be positive");
    if (epochs < 1) throw ArgumentError("config: epochs must be >= 1");
    if (!(vr_alpha > 0.0)) throw ArgumentError("config: VR step must be positive");
    if (!(divergence_threshold > 0.0)) throw ArgumentError("config: divergence threshold must be positive");
    schedule.validate();
}

} // namespace sqnkit
