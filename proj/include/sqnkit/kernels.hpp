#pragma once

// Per-sample kernels of the sigmoid-loss objective.
//
// Each kernel has a serial form and an OpenMP form. The OpenMP forms only
// parallelize the independent per-sample map (margins, tanh, sech^2); every
// reduction afterwards runs serially in index order, so both forms return
// bit-identical results regardless of thread count.

#include <cstddef>
#include <span>

#include "sqnkit/dataset.hpp"

namespace sqnkit::kernels {

enum class Policy { serial, parallel };

/// out[j] = <x, u_{idx[j]}>
void margins(const LabeledDataset& data, std::span<const double> x,
             std::span<const std::size_t> idx, std::span<double> out, Policy policy);

/// out[j] = 1 - tanh(v * <x, u>) for sample idx[j] (no regularizer).
void sigmoid_losses(const LabeledDataset& data, std::span<const double> x,
                    std::span<const std::size_t> idx, std::span<double> out, Policy policy);

/// out[j] = -v * sech^2(v * <x, u>) for sample idx[j]: the scalar multiplying
/// u in the component gradient of the loss.
void sigmoid_coefficients(const LabeledDataset& data, std::span<const double> x,
                          std::span<const std::size_t> idx, std::span<double> out,
                          Policy policy);

/// out = (1/m) sum_j coeff[j] * u_{idx[j]} + 2*lambda*x, accumulated in index order.
void assemble_mean_gradient(const LabeledDataset& data, std::span<const std::size_t> idx,
                            std::span<const double> coeff, std::span<const double> x,
                            double lambda, std::span<double> out);

/// Mean gradient of the regularized sigmoid loss over the batch `idx`.
void mean_gradient(const LabeledDataset& data, std::span<const double> x,
                   std::span<const std::size_t> idx, double lambda, std::span<double> out,
                   Policy policy);

/// Single-loop serial reference for mean_gradient, kept for tests and benchmarks.
void mean_gradient_reference(const LabeledDataset& data, std::span<const double> x,
                             std::span<const std::size_t> idx, double lambda,
                             std::span<double> out);

/// sech^2(z), computed without cancellation for large |z|.
double sech2(double z);

} // namespace sqnkit::kernels
