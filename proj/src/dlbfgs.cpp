#include "sqnkit/dlbfgs.hpp"

#include <cmath>
#include <ostream>

#include "sqnkit/dataset_io.hpp"
#include "sqnkit/errors.hpp"

namespace sqnkit::dlbfgs {
namespace {

double counted_dot(std::span<const double> a, std::span<const double> b, MulCounter* counter)
{
    if (counter) counter->mults += a.size();
    return num::dot(a, b);
}

void counted_axpy(double alpha, std::span<const double> a, std::span<double> b,
                  MulCounter* counter)
{
    if (counter) counter->mults += a.size();
    num::axpy_inplace(alpha, a, b);
}

double gamma_from(double sy, double yy, double delta)
{
    if (sy <= 0.0) return delta;
    const double ratio = yy / sy;
    if (!std::isfinite(ratio)) throw NumericError("compute_gamma: non-finite ratio");
    return std::max(ratio, delta);
}

// sy = s'y and ss = s's are passed in so the caller decides what gets counted.
DampResult damp_with(std::span<const double> s, std::span<const double> y, double gamma,
                     double sy, double ss, MulCounter* counter)
{
    if (ss == 0.0) throw DegenerateStepError("damp: zero step s");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw NumericError("damp: gamma must be > 0");
    const double sbs = gamma * ss;

    DampResult r;
    double inv_rho = sy;
    if (sy < 0.25 * sbs) {
        r.theta = 0.75 * sbs / (sbs - sy);
        r.damped = true;
        inv_rho = 0.25 * sbs;
    }
    r.rho = 1.0 / inv_rho;

    // y_bar = theta * y + ((1 - theta) * gamma) * s, evaluated even when theta = 1
    // so that the cost is the same on both branches.
    r.y_bar.assign(y.size(), 0.0);
    counted_axpy(r.theta, y, r.y_bar, counter);
    counted_axpy((1.0 - r.theta) * gamma, s, r.y_bar, counter);
    return r;
}

} // namespace

double compute_gamma(std::span<const double> s, std::span<const double> y, double delta,
                     MulCounter* counter)
{
    if (!(delta > 0.0)) throw ArgumentError("compute_gamma: delta must be positive");
    num::require_same_size(s.size(), y.size(), "compute_gamma");
    const double sy = counted_dot(s, y, counter);
    const double yy = counted_dot(y, y, counter);
    return gamma_from(sy, yy, delta);
}

DampResult damp(std::span<const double> s, std::span<const double> y, double gamma,
                MulCounter* counter)
{
    num::require_same_size(s.size(), y.size(), "damp");
    const double sy = counted_dot(s, y, counter);
    const double ss = counted_dot(s, s, counter);
    return damp_with(s, y, gamma, sy, ss, counter);
}

LbfgsMemory::LbfgsMemory(std::size_t capacity, double delta, double initial_gamma)
    : capacity_(capacity), delta_(delta), gamma_(initial_gamma)
{
    if (!(delta_ > 0.0) || !std::isfinite(delta_)) {
        throw ArgumentError("LbfgsMemory: delta must be positive");
    }
    if (!(gamma_ > 0.0) || !std::isfinite(gamma_)) {
        throw ArgumentError("LbfgsMemory: initial gamma must be positive");
    }
}

void LbfgsMemory::push_pair(CurvaturePair pair)
{
    if (capacity_ == 0) return;
    if (pairs_.size() == capacity_) pairs_.pop_front();
    pairs_.push_back(std::move(pair));
}

void LbfgsMemory::set_current_gamma(double gamma)
{
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw NumericError("LbfgsMemory: gamma must be positive and finite");
    }
    gamma_ = gamma;
}

Vector two_loop_direction(const LbfgsMemory& memory, double gamma, std::span<const double> g,
                          MulCounter* counter)
{
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw NumericError("two_loop_direction: gamma must be positive");
    }
    const auto& pairs = memory.pairs();
    for (const auto& p : pairs) num::require_same_size(p.s.size(), g.size(), "two_loop_direction");

    const std::size_t q = pairs.size();
    Vector u(g.begin(), g.end());
    std::vector<double> mu(q);
    for (std::size_t i = 0; i < q; ++i) {
        const auto& p = pairs[q - 1 - i];
        mu[i] = p.rho * counted_dot(u, p.s, counter);
        counted_axpy(-mu[i], p.y_bar, u, counter);
    }

    const double inv_gamma = 1.0 / gamma;
    if (counter) counter->mults += u.size();
    for (auto& v : u) v *= inv_gamma;

    for (std::size_t i = 0; i < q; ++i) {
        const auto& p = pairs[i];
        const double nu = p.rho * counted_dot(u, p.y_bar, counter);
        counted_axpy(mu[q - 1 - i] - nu, p.s, u, counter);
    }
    num::require_finite(u, "two_loop_direction");
    return u;
}

DenseMatrix dense_operator(const LbfgsMemory& memory, double gamma, std::size_t n)
{
    for (const auto& p : memory.pairs()) num::require_same_size(p.s.size(), n, "dense_operator");
    DenseMatrix h{n, Vector(n * n, 0.0)};
    for (std::size_t i = 0; i < n; ++i) h(i, i) = 1.0 / gamma;

    DenseMatrix left{n, Vector(n * n)};
    DenseMatrix tmp{n, Vector(n * n)};
    DenseMatrix next{n, Vector(n * n)};
    for (const auto& p : memory.pairs()) {
        // left = I - rho * s * y_bar'
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) {
                left(r, c) = (r == c ? 1.0 : 0.0) - p.rho * p.s[r] * p.y_bar[c];
            }
        }
        // tmp = left * H
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) {
                double acc = 0.0;
                for (std::size_t k = 0; k < n; ++k) acc += left(r, k) * h(k, c);
                tmp(r, c) = acc;
            }
        }
        // next = tmp * left' + rho * s * s'
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) {
                double acc = 0.0;
                for (std::size_t k = 0; k < n; ++k) acc += tmp(r, k) * left(c, k);
                next(r, c) = acc + p.rho * p.s[r] * p.s[c];
            }
        }
        std::swap(h, next);
    }
    return h;
}

UpdateEvent update(LbfgsMemory& memory, std::span<const double> x_prev,
                   std::span<const double> x_curr, std::span<const double> g_prev,
                   std::span<const double> regrad_at_curr, MulCounter* counter)
{
    const Vector s = num::subtract(x_curr, x_prev);
    const Vector y = num::subtract(regrad_at_curr, g_prev);

    UpdateEvent ev;
    ev.gamma = memory.current_gamma();
    if (num::norm_inf(s) <= kZeroStepTolerance * (1.0 + num::norm_inf(x_curr))) {
        ev.outcome = UpdateOutcome::skipped_zero_step;
        return ev;
    }

    const double sy = counted_dot(s, y, counter);
    const double yy = counted_dot(y, y, counter);
    const double gamma = gamma_from(sy, yy, memory.delta());
    memory.set_current_gamma(gamma);

    const double ss = counted_dot(s, s, counter);
    DampResult d = damp_with(s, y, gamma, sy, ss, counter);

    ev.gamma = gamma;
    ev.sy = sy;
    ev.theta = d.theta;
    ev.damped = d.damped;
    ev.negative_curvature = sy < 0.0;
    if (!(d.rho <= kMaxRho)) {
        ev.outcome = UpdateOutcome::rejected_large_rho;
        return ev;
    }
    memory.push_pair(CurvaturePair{s, std::move(d.y_bar), d.rho, d.theta, d.damped, gamma});
    return ev;
}

void dump_state(std::ostream& out, const LbfgsMemory& memory, std::uint64_t iteration)
{
    out << "iteration=" << iteration << " gamma=" << io::format_double(memory.current_gamma())
        << " pairs=" << memory.size() << " theta=[";
    const auto& pairs = memory.pairs();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        out << (i ? "," : "") << io::format_double(pairs[i].theta);
    }
    out << "] rho=[";
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        out << (i ? "," : "") << io::format_double(pairs[i].rho);
    }
    out << "] gamma_at_creation=[";
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        out << (i ? "," : "") << io::format_double(pairs[i].gamma_at_creation);
    }
    out << "]\n";
}

} // namespace sqnkit::dlbfgs
