#include "sqnkit/oracle.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "sqnkit/errors.hpp"

namespace sqnkit {

void SfoCounter::add(std::uint64_t calls)
{
    if (per_iteration_.empty()) per_iteration_.push_back(0);
    per_iteration_.back() += calls;
    total_ += calls;
}

namespace oracle {

BatchIndices sample_batch(rng::Stream& stream, std::size_t dataset_size, std::size_t m,
                          SamplingPolicy policy, std::uint64_t iteration)
{
    if (m == 0) throw ArgumentError("sample_batch: batch size must be at least 1");
    if (dataset_size == 0) throw SamplingError("sample_batch: empty dataset");
    BatchIndices out;
    out.iteration = iteration;
    out.indices.reserve(m);

    if (policy == SamplingPolicy::with_replacement) {
        for (std::size_t j = 0; j < m; ++j) out.indices.push_back(stream.uniform_int(dataset_size));
        return out;
    }

    if (m > dataset_size) {
        throw SamplingError("sample_batch: batch size " + std::to_string(m) +
                            " exceeds dataset size " + std::to_string(dataset_size) +
                            " without replacement");
    }
    // Floyd's algorithm: exactly m draws, uniform over m-subsets.
    if (m * 16 < dataset_size) {
        std::unordered_set<std::size_t> chosen;
        chosen.reserve(2 * m);
        for (std::size_t j = dataset_size - m; j < dataset_size; ++j) {
            const std::size_t t = stream.uniform_int(j + 1);
            const std::size_t pick = chosen.contains(t) ? j : t;
            chosen.insert(pick);
            out.indices.push_back(pick);
        }
    } else {
        std::vector<char> taken(dataset_size, 0);
        for (std::size_t j = dataset_size - m; j < dataset_size; ++j) {
            const std::size_t t = stream.uniform_int(j + 1);
            const std::size_t pick = taken[t] ? j : t;
            taken[pick] = 1;
            out.indices.push_back(pick);
        }
    }
    std::sort(out.indices.begin(), out.indices.end());
    return out;
}

Vector batch_gradient(const FiniteSumProblem& problem, std::span<const double> x,
                      const BatchIndices& batch, SfoCounter& counter)
{
    if (batch.indices.empty()) throw ArgumentError("batch_gradient: empty batch");
    for (std::size_t i : batch.indices) {
        if (i >= problem.size()) {
            throw IndexError("batch_gradient: sample index " + std::to_string(i) +
                             " out of range");
        }
    }
    Vector g(problem.dim());
    problem.mean_gradient(x, batch.indices, g);
    num::require_finite(g, "batch_gradient");
    counter.add(batch.indices.size());
    return g;
}

Vector batch_gradient_at(const FiniteSumProblem& problem, std::span<const double> x_new,
                         const BatchIndices& batch_prev, SfoCounter& counter)
{
    return batch_gradient(problem, x_new, batch_prev, counter);
}

BatchIndices all_indices(std::size_t dataset_size)
{
    BatchIndices b;
    b.indices.resize(dataset_size);
    std::iota(b.indices.begin(), b.indices.end(), std::size_t{0});
    return b;
}

Vector full_gradient(const FiniteSumProblem& problem, std::span<const double> x,
                     SfoCounter& counter)
{
    return batch_gradient(problem, x, all_indices(problem.size()), counter);
}

} // namespace oracle
} // namespace sqnkit
