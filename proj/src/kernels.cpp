#include "sqnkit/kernels.hpp"

#include <cmath>
#include <vector>

#include "sqnkit/errors.hpp"

namespace sqnkit::kernels {
namespace {

inline double margin_of(const SparseSample& s, std::span<const double> x)
{
    const auto ind = s.features.indices();
    const auto val = s.features.values();
    double sum = 0.0;
    for (std::size_t j = 0; j < ind.size(); ++j) sum += val[j] * x[ind[j]];
    return sum;
}

void check(const LabeledDataset& data, std::span<const double> x,
           std::span<const std::size_t> idx, std::size_t out_size)
{
    if (x.size() != data.dim()) throw DimensionError("kernel: iterate dimension mismatch");
    if (out_size != idx.size()) throw DimensionError("kernel: output length mismatch");
    for (std::size_t i : idx) {
        if (i >= data.size()) throw IndexError("kernel: sample index out of range");
    }
}

template <typename F>
void map_samples(std::span<const std::size_t> idx, std::span<double> out, Policy policy, F&& f)
{
    const auto count = static_cast<std::ptrdiff_t>(idx.size());
    if (policy == Policy::parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t j = 0; j < count; ++j) out[j] = f(idx[j]);
    } else {
        for (std::ptrdiff_t j = 0; j < count; ++j) out[j] = f(idx[j]);
    }
}

} // namespace

double sech2(double z)
{
    const double c = std::cosh(z);
    return 1.0 / (c * c);
}

void margins(const LabeledDataset& data, std::span<const double> x,
             std::span<const std::size_t> idx, std::span<double> out, Policy policy)
{
    check(data, x, idx, out.size());
    map_samples(idx, out, policy, [&](std::size_t i) { return margin_of(data[i], x); });
}

void sigmoid_losses(const LabeledDataset& data, std::span<const double> x,
                    std::span<const std::size_t> idx, std::span<double> out, Policy policy)
{
    check(data, x, idx, out.size());
    map_samples(idx, out, policy, [&](std::size_t i) {
        const double v = data[i].label;
        return 1.0 - std::tanh(v * margin_of(data[i], x));
    });
}

void sigmoid_coefficients(const LabeledDataset& data, std::span<const double> x,
                          std::span<const std::size_t> idx, std::span<double> out,
                          Policy policy)
{
    check(data, x, idx, out.size());
    map_samples(idx, out, policy, [&](std::size_t i) {
        const double v = data[i].label;
        return -v * sech2(v * margin_of(data[i], x));
    });
}

void assemble_mean_gradient(const LabeledDataset& data, std::span<const std::size_t> idx,
                            std::span<const double> coeff, std::span<const double> x,
                            double lambda, std::span<double> out)
{
    if (out.size() != data.dim() || x.size() != data.dim()) {
        throw DimensionError("assemble_mean_gradient: dimension mismatch");
    }
    if (idx.empty()) throw ArgumentError("assemble_mean_gradient: empty batch");
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t j = 0; j < idx.size(); ++j) {
        const auto& u = data[idx[j]].features;
        const auto ind = u.indices();
        const auto val = u.values();
        for (std::size_t t = 0; t < ind.size(); ++t) out[ind[t]] += coeff[j] * val[t];
    }
    const double m = static_cast<double>(idx.size());
    for (std::size_t d = 0; d < out.size(); ++d) out[d] = out[d] / m + 2.0 * lambda * x[d];
}

void mean_gradient(const LabeledDataset& data, std::span<const double> x,
                   std::span<const std::size_t> idx, double lambda, std::span<double> out,
                   Policy policy)
{
    std::vector<double> coeff(idx.size());
    sigmoid_coefficients(data, x, idx, coeff, policy);
    assemble_mean_gradient(data, idx, coeff, x, lambda, out);
}

void mean_gradient_reference(const LabeledDataset& data, std::span<const double> x,
                             std::span<const std::size_t> idx, double lambda,
                             std::span<double> out)
{
    check(data, x, idx, idx.size());
    if (out.size() != data.dim()) throw DimensionError("mean_gradient: output mismatch");
    if (idx.empty()) throw ArgumentError("mean_gradient: empty batch");
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i : idx) {
        const auto& s = data[i];
        const double v = s.label;
        const double c = -v * sech2(v * margin_of(s, x));
        const auto ind = s.features.indices();
        const auto val = s.features.values();
        for (std::size_t t = 0; t < ind.size(); ++t) out[ind[t]] += c * val[t];
    }
    const double m = static_cast<double>(idx.size());
    for (std::size_t d = 0; d < out.size(); ++d) out[d] = out[d] / m + 2.0 * lambda * x[d];
}

} // namespace sqnkit::kernels
