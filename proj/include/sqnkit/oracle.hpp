#pragma once

// Stochastic first-order oracle: finite-sum problems, mini-batch sampling and
// component-gradient accounting.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sqnkit/numerics.hpp"
#include "sqnkit/rng.hpp"

namespace sqnkit {

/// f(x) = (1/T) sum_i f_i(x) with separately evaluable components.
class FiniteSumProblem {
public:
    virtual ~FiniteSumProblem() = default;

    virtual std::size_t size() const = 0;
    virtual std::size_t dim() const = 0;

    virtual double component_loss(std::size_t i, std::span<const double> x) const = 0;

    /// out = (1/m) sum_j grad f_{idx[j]}(x). Throws IndexError on a bad index.
    virtual void mean_gradient(std::span<const double> x, std::span<const std::size_t> idx,
                               std::span<double> out) const = 0;
};

enum class SamplingPolicy { with_replacement, without_replacement };

/// Sample identifiers drawn for one iteration.
struct BatchIndices {
    std::vector<std::size_t> indices;
    std::uint64_t iteration = 0;

    std::size_t size() const noexcept { return indices.size(); }
    friend bool operator==(const BatchIndices&, const BatchIndices&) = default;
};

/// Counts component-gradient evaluations; total == sum(per_iteration).
class SfoCounter {
public:
    void begin_iteration() { per_iteration_.push_back(0); }
    void add(std::uint64_t calls);

    std::uint64_t total() const noexcept { return total_; }
    const std::vector<std::uint64_t>& per_iteration() const noexcept { return per_iteration_; }

private:
    std::uint64_t total_ = 0;
    std::vector<std::uint64_t> per_iteration_;
};

namespace oracle {

/// Draws m indices from [0, dataset_size). Without replacement the indices are
/// distinct and returned sorted; with replacement they keep draw order.
BatchIndices sample_batch(rng::Stream& stream, std::size_t dataset_size, std::size_t m,
                          SamplingPolicy policy, std::uint64_t iteration = 0);

/// Mini-batch gradient (1/m) sum grad f_i(x); counter += m.
Vector batch_gradient(const FiniteSumProblem& problem, std::span<const double> x,
                      const BatchIndices& batch, SfoCounter& counter);

/// Gradient at a new point on the previous iteration's batch; counter += m_prev.
Vector batch_gradient_at(const FiniteSumProblem& problem, std::span<const double> x_new,
                         const BatchIndices& batch_prev, SfoCounter& counter);

/// Full gradient (1/T) sum grad f_i(x); counter += T.
Vector full_gradient(const FiniteSumProblem& problem, std::span<const double> x,
                     SfoCounter& counter);

/// The batch {0, ..., T-1}.
BatchIndices all_indices(std::size_t dataset_size);

} // namespace oracle
} // namespace sqnkit
