#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "sqnkit/dataset.hpp"
#include "sqnkit/dlbfgs.hpp"
#include "sqnkit/problems.hpp"
#include "sqnkit/rng.hpp"

namespace testing {

using sqnkit::Vector;

inline Vector random_vector(sqnkit::rng::Stream& s, std::size_t n, double lo = -1.0,
                            double hi = 1.0)
{
    Vector v(n);
    for (auto& e : v) e = s.uniform(lo, hi);
    return v;
}

inline double rel_err(const Vector& a, const Vector& b)
{
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

/// Small synthetic sigmoid-SVM dataset.
inline std::shared_ptr<const sqnkit::LabeledDataset> small_dataset(std::size_t n,
                                                                    std::size_t count,
                                                                    double density,
                                                                    std::uint64_t seed)
{
    sqnkit::rng::Stream s(seed, "test-data");
    auto syn = sqnkit::problems::generate_synthetic(n, count, density, s);
    return std::make_shared<const sqnkit::LabeledDataset>(std::move(syn.data));
}

/// Fills a memory with `pairs` random curvature pairs damped at random gammas.
inline sqnkit::dlbfgs::LbfgsMemory random_memory(sqnkit::rng::Stream& s, std::size_t n,
                                                 std::size_t capacity, std::size_t pairs)
{
    sqnkit::dlbfgs::LbfgsMemory mem(capacity);
    for (std::size_t j = 0; j < pairs; ++j) {
        Vector sv = random_vector(s, n);
        Vector yv = random_vector(s, n);
        const double gamma = s.uniform(0.05, 5.0);
        auto d = sqnkit::dlbfgs::damp(sv, yv, gamma);
        mem.push_pair({sv, d.y_bar, d.rho, d.theta, d.damped, gamma});
        mem.set_current_gamma(gamma);
    }
    return mem;
}

/// Symmetric matrix Q diag(ev) Q' with Q from Gram-Schmidt on random vectors.
inline Vector random_symmetric(sqnkit::rng::Stream& s, std::size_t n, const Vector& ev)
{
    std::vector<Vector> q;
    while (q.size() < n) {
        Vector v = random_vector(s, n);
        for (const auto& u : q) {
            double d = 0.0;
            for (std::size_t i = 0; i < n; ++i) d += u[i] * v[i];
            for (std::size_t i = 0; i < n; ++i) v[i] -= d * u[i];
        }
        double nv = 0.0;
        for (double e : v) nv += e * e;
        nv = std::sqrt(nv);
        if (nv < 1e-8) continue;
        for (auto& e : v) e /= nv;
        q.push_back(std::move(v));
    }
    Vector a(n * n, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            for (std::size_t k = 0; k < n; ++k) a[r * n + c] += q[k][r] * ev[k] * q[k][c];
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = r + 1; c < n; ++c) a[c * n + r] = a[r * n + c];
    return a;
}

} // namespace testing
