#include "sqnkit/numerics.hpp"

#include <cmath>
#include <string>

#include "sqnkit/errors.hpp"

namespace sqnkit::num {

void require_same_size(std::size_t a, std::size_t b, const char* what)
{
    if (a != b) {
        throw DimensionError(std::string(what) + ": length mismatch (" + std::to_string(a) +
                             " vs " + std::to_string(b) + ")");
    }
}

void require_finite(std::span<const double> a, const char* what)
{
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!std::isfinite(a[i])) {
            throw NumericError(std::string(what) + ": non-finite entry at index " +
                               std::to_string(i));
        }
    }
}

double dot(std::span<const double> a, std::span<const double> b)
{
    require_same_size(a.size(), b.size(), "dot");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    if (!std::isfinite(sum)) throw NumericError("dot: non-finite result");
    return sum;
}

Vector axpy(double alpha, std::span<const double> a, std::span<const double> b)
{
    require_same_size(a.size(), b.size(), "axpy");
    Vector out(b.begin(), b.end());
    axpy_inplace(alpha, a, out);
    return out;
}

void axpy_inplace(double alpha, std::span<const double> a, std::span<double> b)
{
    require_same_size(a.size(), b.size(), "axpy");
    if (!std::isfinite(alpha)) throw NumericError("axpy: non-finite scale");
    for (std::size_t i = 0; i < a.size(); ++i) b[i] += alpha * a[i];
    require_finite(b, "axpy");
}

Vector subtract(std::span<const double> a, std::span<const double> b)
{
    require_same_size(a.size(), b.size(), "subtract");
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    require_finite(out, "subtract");
    return out;
}

double norm2(std::span<const double> a)
{
    return std::sqrt(dot(a, a));
}

double norm_inf(std::span<const double> a)
{
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

double sparse_dot(const SparseVector& u, std::span<const double> x)
{
    require_same_size(u.dim(), x.size(), "sparse_dot");
    const auto idx = u.indices();
    const auto val = u.values();
    double sum = 0.0;
    for (std::size_t j = 0; j < idx.size(); ++j) sum += val[j] * x[idx[j]];
    if (!std::isfinite(sum)) throw NumericError("sparse_dot: non-finite result");
    return sum;
}

} // namespace sqnkit::num

namespace sqnkit {

SparseVector::SparseVector(std::vector<std::uint32_t> indices, std::vector<double> values,
                           std::size_t dim)
    : indices_(std::move(indices)), values_(std::move(values)), dim_(dim)
{
    if (indices_.size() != values_.size()) {
        throw ArgumentError("SparseVector: indices and values differ in length");
    }
    for (std::size_t j = 0; j < indices_.size(); ++j) {
        if (indices_[j] >= dim_) throw ArgumentError("SparseVector: index out of range");
        if (j > 0 && indices_[j] <= indices_[j - 1]) {
            throw ArgumentError("SparseVector: indices not strictly increasing");
        }
        if (!std::isfinite(values_[j]) || values_[j] == 0.0) {
            throw ArgumentError("SparseVector: values must be finite and nonzero");
        }
    }
}

Vector SparseVector::densify() const
{
    Vector out(dim_, 0.0);
    for (std::size_t j = 0; j < indices_.size(); ++j) out[indices_[j]] = values_[j];
    return out;
}

double SparseVector::squared_norm() const
{
    double sum = 0.0;
    for (double v : values_) sum += v * v;
    return sum;
}

} // namespace sqnkit
