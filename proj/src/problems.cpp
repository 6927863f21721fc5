#include "sqnkit/problems.hpp"

#include <cmath>
#include <numeric>

#include "sqnkit/errors.hpp"

namespace sqnkit {

LabeledDataset::LabeledDataset(std::vector<SparseSample> samples, std::size_t dim)
    : samples_(std::move(samples)), dim_(dim)
{
    if (samples_.empty()) throw ArgumentError("LabeledDataset: no samples");
    for (const auto& s : samples_) {
        if (s.features.dim() != dim_) throw ArgumentError("LabeledDataset: dimension mismatch");
        if (s.label != 1 && s.label != -1) throw ArgumentError("LabeledDataset: label not +-1");
    }
}

SigmoidSvmProblem::SigmoidSvmProblem(std::shared_ptr<const LabeledDataset> data, double lambda,
                                     kernels::Policy policy)
    : data_(std::move(data)), lambda_(lambda), policy_(policy)
{
    if (!data_ || data_->empty()) throw ArgumentError("SigmoidSvmProblem: empty dataset");
    if (!std::isfinite(lambda_) || lambda_ < 0.0) {
        throw ArgumentError("SigmoidSvmProblem: lambda must be finite and nonnegative");
    }
}

double SigmoidSvmProblem::component_loss(std::size_t i, std::span<const double> x) const
{
    if (i >= data_->size()) throw IndexError("component_loss: index out of range");
    const auto& s = (*data_)[i];
    const double z = s.label * num::sparse_dot(s.features, x);
    return 1.0 - std::tanh(z) + lambda_ * num::dot(x, x);
}

void SigmoidSvmProblem::mean_gradient(std::span<const double> x,
                                      std::span<const std::size_t> idx,
                                      std::span<double> out) const
{
    kernels::mean_gradient(*data_, x, idx, lambda_, out, policy_);
}

Vector SigmoidSvmProblem::component_gradient(std::size_t i, std::span<const double> x) const
{
    if (i >= data_->size()) throw IndexError("component_gradient: index out of range");
    Vector g(dim());
    const std::size_t one[1] = {i};
    kernels::mean_gradient(*data_, x, one, lambda_, g, kernels::Policy::serial);
    return g;
}

QuadraticSumProblem::QuadraticSumProblem(std::size_t n, std::vector<Vector> hessians,
                                         std::vector<Vector> linear)
    : n_(n), hessians_(std::move(hessians)), linear_(std::move(linear))
{
    if (hessians_.empty() || hessians_.size() != linear_.size()) {
        throw ArgumentError("QuadraticSumProblem: need matching nonempty component lists");
    }
    for (std::size_t i = 0; i < hessians_.size(); ++i) {
        num::require_same_size(hessians_[i].size(), n_ * n_, "QuadraticSumProblem hessian");
        num::require_same_size(linear_[i].size(), n_, "QuadraticSumProblem linear term");
    }
}

double QuadraticSumProblem::component_loss(std::size_t i, std::span<const double> x) const
{
    if (i >= size()) throw IndexError("component_loss: index out of range");
    num::require_same_size(x.size(), n_, "component_loss");
    const auto& a = hessians_[i];
    double quad = 0.0;
    for (std::size_t r = 0; r < n_; ++r) {
        double row = 0.0;
        for (std::size_t c = 0; c < n_; ++c) row += a[r * n_ + c] * x[c];
        quad += x[r] * row;
    }
    return 0.5 * quad + num::dot(linear_[i], x);
}

void QuadraticSumProblem::mean_gradient(std::span<const double> x,
                                        std::span<const std::size_t> idx,
                                        std::span<double> out) const
{
    num::require_same_size(x.size(), n_, "mean_gradient");
    num::require_same_size(out.size(), n_, "mean_gradient");
    if (idx.empty()) throw ArgumentError("mean_gradient: empty batch");
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i : idx) {
        if (i >= size()) throw IndexError("mean_gradient: index out of range");
        const auto& a = hessians_[i];
        for (std::size_t r = 0; r < n_; ++r) {
            double row = linear_[i][r];
            for (std::size_t c = 0; c < n_; ++c) row += a[r * n_ + c] * x[c];
            out[r] += row;
        }
    }
    const double m = static_cast<double>(idx.size());
    for (auto& v : out) v /= m;
}

namespace problems {

int sign_label(double margin) noexcept
{
    return margin >= 0.0 ? 1 : -1;
}

Vector draw_planted(std::size_t n, rng::Stream& stream)
{
    Vector x(n);
    for (auto& v : x) v = stream.uniform(-1.0, 1.0);
    return x;
}

LabeledDataset draw_samples(std::span<const double> planted, std::size_t count, double density,
                            rng::Stream& stream)
{
    const std::size_t n = planted.size();
    if (!(density > 0.0 && density <= 1.0)) {
        throw ArgumentError("generate_synthetic: density must lie in (0, 1]");
    }
    if (n == 0 || count == 0) throw ArgumentError("generate_synthetic: n and count must be >= 1");
    const auto nnz = static_cast<std::size_t>(std::lround(density * static_cast<double>(n)));

    std::vector<SparseSample> samples;
    samples.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::vector<std::uint32_t> ind;
        std::vector<double> val;
        if (nnz > 0) {
            const auto pos = oracle::sample_batch(stream, n, nnz,
                                                  SamplingPolicy::without_replacement);
            ind.reserve(nnz);
            for (std::size_t p : pos.indices) ind.push_back(static_cast<std::uint32_t>(p));
            val.resize(nnz);
            for (auto& v : val) v = stream.uniform_open01();
        }
        SparseVector u(std::move(ind), std::move(val), n);
        const int label = sign_label(num::sparse_dot(u, planted));
        samples.push_back({std::move(u), label});
    }
    return LabeledDataset(std::move(samples), n);
}

SyntheticData generate_synthetic(std::size_t n, std::size_t count, double density,
                                 rng::Stream& stream)
{
    if (!(density > 0.0 && density <= 1.0)) {
        throw ArgumentError("generate_synthetic: density must lie in (0, 1]");
    }
    Vector planted = draw_planted(n, stream);
    LabeledDataset data = draw_samples(planted, count, density, stream);
    return {std::move(data), std::move(planted)};
}

Vector initial_point(std::size_t n, rng::Stream& stream, double scale)
{
    Vector x(n);
    for (auto& v : x) v = scale * stream.uniform01();
    return x;
}

std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& data,
                                                double train_fraction, rng::Stream& stream)
{
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ArgumentError("split: train fraction must lie in (0, 1)");
    }
    const std::size_t total = data.size();
    const auto n_train =
        static_cast<std::size_t>(std::lround(train_fraction * static_cast<double>(total)));
    if (n_train == 0 || n_train == total) throw ArgumentError("split: a side would be empty");

    std::vector<std::size_t> perm(total);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = total - 1; i > 0; --i) {
        std::swap(perm[i], perm[stream.uniform_int(i + 1)]);
    }
    std::vector<SparseSample> train, test;
    for (std::size_t k = 0; k < total; ++k) {
        (k < n_train ? train : test).push_back(data[perm[k]]);
    }
    return {LabeledDataset(std::move(train), data.dim()),
            LabeledDataset(std::move(test), data.dim())};
}

double sng(std::span<const double> x, const LabeledDataset& testset, double lambda,
           kernels::Policy policy)
{
    if (testset.empty()) throw ArgumentError("sng: empty test set");
    const auto all = oracle::all_indices(testset.size());
    Vector g(testset.dim());
    kernels::mean_gradient(testset, x, all.indices, lambda, g, policy);
    double sum = 0.0;
    for (double v : g) sum += v * v;
    return sum;
}

double accuracy(std::span<const double> x, const LabeledDataset& testset,
                kernels::Policy policy)
{
    if (testset.empty()) throw ArgumentError("accuracy: empty test set");
    const auto all = oracle::all_indices(testset.size());
    Vector m(testset.size());
    kernels::margins(testset, x, all.indices, m, policy);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (sign_label(m[i]) == testset[i].label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(testset.size());
}

double objective(std::span<const double> x, const LabeledDataset& dataset, double lambda,
                 kernels::Policy policy)
{
    if (dataset.empty()) throw ArgumentError("objective: empty dataset");
    const auto all = oracle::all_indices(dataset.size());
    Vector losses(dataset.size());
    kernels::sigmoid_losses(dataset, x, all.indices, losses, policy);
    double sum = 0.0;
    for (double l : losses) sum += l;
    return sum / static_cast<double>(dataset.size()) + lambda * num::dot(x, x);
}

} // namespace problems
} // namespace sqnkit
