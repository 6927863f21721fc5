#pragma once

// Stochastic damped L-BFGS inverse-Hessian operator.
//
// H_{k,0} = gamma^{-1} I with gamma = max(y'y / s'y, delta) (delta when s'y <= 0),
// and each stored pair uses the damped difference
//   y_bar = theta * y + (1 - theta) * gamma * s,
// which guarantees s'y_bar >= 0.25 * gamma * ||s||^2, so every rank-two update
// keeps the operator positive definite without any convexity assumption.

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <span>

#include "sqnkit/numerics.hpp"

namespace sqnkit::dlbfgs {

inline constexpr double kDefaultDelta = 0.01;
inline constexpr double kMaxRho = 1e14;
inline constexpr double kZeroStepTolerance = 1e-14;

/// Counts vector-element multiplications performed by the operator.
struct MulCounter {
    std::uint64_t mults = 0;
};

struct CurvaturePair {
    Vector s;
    Vector y_bar;
    double rho = 0.0;
    double theta = 1.0;
    bool damped = false;
    double gamma_at_creation = 1.0;
};

struct DampResult {
    Vector y_bar;
    double rho = 0.0;
    double theta = 1.0;
    bool damped = false;
};

double compute_gamma(std::span<const double> s, std::span<const double> y, double delta,
                     MulCounter* counter = nullptr);

/// Throws DegenerateStepError when s = 0.
DampResult damp(std::span<const double> s, std::span<const double> y, double gamma,
                MulCounter* counter = nullptr);

/// Bounded FIFO of curvature pairs (oldest first) plus the scaling state.
class LbfgsMemory {
public:
    explicit LbfgsMemory(std::size_t capacity, double delta = kDefaultDelta,
                         double initial_gamma = 1.0);

    /// Appends, evicting the oldest pair when full. No-op when capacity is 0.
    void push_pair(CurvaturePair pair);

    std::size_t capacity() const noexcept { return capacity_; }
    std::size_t size() const noexcept { return pairs_.size(); }
    bool empty() const noexcept { return pairs_.empty(); }
    const std::deque<CurvaturePair>& pairs() const noexcept { return pairs_; }

    double delta() const noexcept { return delta_; }
    double current_gamma() const noexcept { return gamma_; }
    void set_current_gamma(double gamma);

private:
    std::deque<CurvaturePair> pairs_;
    std::size_t capacity_;
    double delta_;
    double gamma_;
};

/// H * g by the two-loop recursion over the stored pairs, with H_0 = gamma^{-1} I.
Vector two_loop_direction(const LbfgsMemory& memory, double gamma, std::span<const double> g,
                          MulCounter* counter = nullptr);

/// Row-major square matrix; only used as a test oracle.
struct DenseMatrix {
    std::size_t n = 0;
    Vector data;
    double operator()(std::size_t r, std::size_t c) const { return data[r * n + c]; }
    double& operator()(std::size_t r, std::size_t c) { return data[r * n + c]; }
};

/// Explicit H = product of damped BFGS updates applied oldest-first to gamma^{-1} I.
DenseMatrix dense_operator(const LbfgsMemory& memory, double gamma, std::size_t n);

enum class UpdateOutcome { pushed, skipped_zero_step, rejected_large_rho };

struct UpdateEvent {
    UpdateOutcome outcome = UpdateOutcome::pushed;
    bool damped = false;
    bool negative_curvature = false; // s'y < 0
    double gamma = 0.0;
    double theta = 1.0;
    double sy = 0.0;
};

/// Forms s = x_curr - x_prev and y = regrad_at_curr - g_prev, refreshes the
/// memory's gamma, damps and stores the pair. A zero step leaves the memory
/// (gamma included) untouched.
UpdateEvent update(LbfgsMemory& memory, std::span<const double> x_prev,
                   std::span<const double> x_curr, std::span<const double> g_prev,
                   std::span<const double> regrad_at_curr, MulCounter* counter = nullptr);

/// One-line structured record of the memory state.
void dump_state(std::ostream& out, const LbfgsMemory& memory, std::uint64_t iteration);

} // namespace sqnkit::dlbfgs
