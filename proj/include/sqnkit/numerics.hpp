#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sqnkit {

/// Dense real vector: iterates, gradients, curvature pairs.
using Vector = std::vector<double>;

namespace num {

double dot(std::span<const double> a, std::span<const double> b);

/// alpha * a + b as a new vector.
Vector axpy(double alpha, std::span<const double> a, std::span<const double> b);

/// b += alpha * a, in place.
void axpy_inplace(double alpha, std::span<const double> a, std::span<double> b);

Vector subtract(std::span<const double> a, std::span<const double> b);

double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);

/// Throws NumericError naming `what` if any entry is NaN or infinite.
void require_finite(std::span<const double> a, const char* what);

void require_same_size(std::size_t a, std::size_t b, const char* what);

} // namespace num

/// Sparse vector with strictly increasing 0-based indices and nonzero values.
class SparseVector {
public:
    SparseVector() = default;
    explicit SparseVector(std::size_t dim) : dim_(dim) {}

    /// Validates the invariants; throws ArgumentError on violation.
    SparseVector(std::vector<std::uint32_t> indices, std::vector<double> values, std::size_t dim);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t nnz() const noexcept { return indices_.size(); }
    std::span<const std::uint32_t> indices() const noexcept { return indices_; }
    std::span<const double> values() const noexcept { return values_; }

    Vector densify() const;
    double squared_norm() const;

    friend bool operator==(const SparseVector&, const SparseVector&) = default;

private:
    std::vector<std::uint32_t> indices_;
    std::vector<double> values_;
    std::size_t dim_ = 0;
};

namespace num {

double sparse_dot(const SparseVector& u, std::span<const double> x);

} // namespace num

} // namespace sqnkit
