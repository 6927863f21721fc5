#pragma once

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "sqnkit/dataset.hpp"
#include "sqnkit/kernels.hpp"
#include "sqnkit/oracle.hpp"
#include "sqnkit/rng.hpp"

namespace sqnkit {

inline constexpr double kDefaultLambda = 1e-4;

/// Nonconvex sigmoid-loss SVM:
///   f_i(x) = 1 - tanh(v_i <x, u_i>) + lambda * ||x||^2
class SigmoidSvmProblem final : public FiniteSumProblem {
public:
    explicit SigmoidSvmProblem(std::shared_ptr<const LabeledDataset> data,
                               double lambda = kDefaultLambda,
                               kernels::Policy policy = kernels::Policy::serial);

    std::size_t size() const override { return data_->size(); }
    std::size_t dim() const override { return data_->dim(); }

    double component_loss(std::size_t i, std::span<const double> x) const override;
    void mean_gradient(std::span<const double> x, std::span<const std::size_t> idx,
                       std::span<double> out) const override;

    Vector component_gradient(std::size_t i, std::span<const double> x) const;

    const LabeledDataset& data() const noexcept { return *data_; }
    double lambda() const noexcept { return lambda_; }
    kernels::Policy policy() const noexcept { return policy_; }

private:
    std::shared_ptr<const LabeledDataset> data_;
    double lambda_;
    kernels::Policy policy_;
};

/// f_i(x) = 0.5 x'A_i x + b_i'x with dense symmetric A_i (row-major n x n).
class QuadraticSumProblem final : public FiniteSumProblem {
public:
    QuadraticSumProblem(std::size_t n, std::vector<Vector> hessians, std::vector<Vector> linear);

    std::size_t size() const override { return hessians_.size(); }
    std::size_t dim() const override { return n_; }

    double component_loss(std::size_t i, std::span<const double> x) const override;
    void mean_gradient(std::span<const double> x, std::span<const std::size_t> idx,
                       std::span<double> out) const override;

    const Vector& hessian(std::size_t i) const { return hessians_.at(i); }

private:
    std::size_t n_;
    std::vector<Vector> hessians_;
    std::vector<Vector> linear_;
};

namespace problems {

struct SyntheticData {
    LabeledDataset data;
    Vector planted;
};

/// Planted separator, uniform on [-1, 1]^n.
Vector draw_planted(std::size_t n, rng::Stream& stream);

/// `count` samples with exactly round(density*n) nonzeros each, values uniform
/// on (0, 1) at uniformly chosen positions, labels sign(<planted, u>) with
/// sign(0) = +1.
LabeledDataset draw_samples(std::span<const double> planted, std::size_t count, double density,
                            rng::Stream& stream);

SyntheticData generate_synthetic(std::size_t n, std::size_t count, double density,
                                 rng::Stream& stream);

/// scale * (uniform on [0, 1]^n); scale 5 is the usual starting point.
Vector initial_point(std::size_t n, rng::Stream& stream, double scale = 5.0);

/// Random split into (train, test) with round(train_fraction * T) training samples.
std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& data,
                                                double train_fraction, rng::Stream& stream);

int sign_label(double margin) noexcept;

/// Squared norm of the averaged regularized gradient over `testset`.
double sng(std::span<const double> x, const LabeledDataset& testset, double lambda,
           kernels::Policy policy = kernels::Policy::serial);

/// Fraction of samples whose predicted sign (ties -> +1) matches the label.
double accuracy(std::span<const double> x, const LabeledDataset& testset,
                kernels::Policy policy = kernels::Policy::serial);

/// Mean regularized sigmoid loss over `dataset`.
double objective(std::span<const double> x, const LabeledDataset& dataset, double lambda,
                 kernels::Policy policy = kernels::Policy::serial);

} // namespace problems
} // namespace sqnkit
