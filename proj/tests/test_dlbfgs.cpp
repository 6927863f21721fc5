#include <algorithm>
#include <Eigen/Dense>
#include <sstream>

#include "doctest.h"
#include "sqnkit/dlbfgs.hpp"
#include "sqnkit/errors.hpp"
#include "sqnkit/problems.hpp"
#include "support.hpp"

using namespace sqnkit;
using namespace sqnkit::dlbfgs;

namespace {

Eigen::MatrixXd to_eigen(const DenseMatrix& m)
{
    Eigen::MatrixXd e(m.n, m.n);
    for (std::size_t r = 0; r < m.n; ++r)
        for (std::size_t c = 0; c < m.n; ++c) e(r, c) = m(r, c);
    return e;
}

} // namespace

TEST_CASE("gamma example")
{
    // y'y / s'y = 8 / 4
    CHECK(compute_gamma(Vector{1, 1}, Vector{2, 2}, 0.01) == 2.0);
    CHECK(compute_gamma(Vector{1, 0}, Vector{1e-4, 0}, 0.01) == 0.01);
    CHECK(compute_gamma(Vector{1, 0}, Vector{-1, 0}, 0.01) == 0.01);
    CHECK(compute_gamma(Vector{1, 0}, Vector{0, 1}, 0.5) == 0.5);
}

TEST_CASE("damping example on the damped branch")
{
    // s'y = -1 < 0.25 * 4 * 1 = 1: theta = 0.75*4/(4+1) = 0.6,
    // y_bar = 0.6*(-1) + 0.4*4*1 = 1, rho = 1/(0.25*4) = 1.
    const auto d = damp(Vector{1}, Vector{-1}, 4.0);
    CHECK(d.damped);
    CHECK(d.theta == doctest::Approx(0.6));
    CHECK(d.y_bar[0] == doctest::Approx(1.0));
    CHECK(d.rho == doctest::Approx(1.0));
}

TEST_CASE("no damping when curvature is large enough")
{
    const auto d = damp(Vector{1, 0}, Vector{2, 1}, 1.0);
    CHECK_FALSE(d.damped);
    CHECK(d.theta == 1.0);
    CHECK(d.y_bar == Vector{2, 1});
    CHECK(d.rho == 0.5);
    CHECK_THROWS_AS(damp(Vector{0, 0}, Vector{1, 1}, 1.0), DegenerateStepError);
}

TEST_CASE("damping guarantee holds on random draws")
{
    rng::Stream s(1, "damp-prop");
    for (int t = 0; t < 2000; ++t) {
        const std::size_t n = 1 + s.uniform_int(12);
        const Vector sv = testing::random_vector(s, n);
        const Vector yv = testing::random_vector(s, n);
        const double gamma = std::exp(s.uniform(-5, 5));
        const auto d = damp(sv, yv, gamma);
        const double ss = num::dot(sv, sv);
        const double sy_bar = num::dot(sv, d.y_bar);
        CHECK(d.theta > 0.0);
        CHECK(d.theta <= 1.0);
        CHECK(sy_bar >= 0.25 * gamma * ss - 1e-12 * (gamma * ss + 1.0));
        CHECK(d.rho > 0.0);
    }
}

TEST_CASE("memory is a bounded fifo")
{
    LbfgsMemory m(2);
    for (int i = 1; i <= 3; ++i) {
        m.push_pair({Vector{double(i)}, Vector{1.0}, 1.0, 1.0, false, 1.0});
    }
    REQUIRE(m.size() == 2);
    CHECK(m.pairs().front().s[0] == 2.0);
    CHECK(m.pairs().back().s[0] == 3.0);

    LbfgsMemory none(0);
    none.push_pair({Vector{1.0}, Vector{1.0}, 1.0, 1.0, false, 1.0});
    CHECK(none.empty());
}

TEST_CASE("empty memory gives a scaled gradient")
{
    LbfgsMemory m(5);
    CHECK(two_loop_direction(m, 4.0, Vector{2, -8}) == Vector{0.5, -2});
}

TEST_CASE("two-loop recursion matches the dense operator")
{
    rng::Stream s(2, "two-loop");
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 1 + s.uniform_int(15);
        const std::size_t p = s.uniform_int(8);
        auto mem = testing::random_memory(s, n, p, p + s.uniform_int(3));
        const double gamma = s.uniform(0.05, 5);
        const Vector g = testing::random_vector(s, n);
        const Vector d = two_loop_direction(mem, gamma, g);
        const DenseMatrix h = dense_operator(mem, gamma, n);
        Vector hd(n, 0.0);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) hd[r] += h(r, c) * g[c];
        CHECK(testing::rel_err(d, hd) <= 1e-10);
    }
}

TEST_CASE("dense operator is symmetric positive definite")
{
    rng::Stream s(3, "spd");
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 2 + s.uniform_int(10);
        auto mem = testing::random_memory(s, n, 6, 6);
        const auto h = to_eigen(dense_operator(mem, s.uniform(0.01, 3), n));
        CHECK((h - h.transpose()).norm() <= 1e-9 * h.norm());
        const Eigen::MatrixXd sym = 0.5 * (h + h.transpose());
        Eigen::LLT<Eigen::MatrixXd> llt(sym);
        CHECK(llt.info() == Eigen::Success);
    }
}

TEST_CASE("secant equation holds for the newest pair")
{
    rng::Stream s(4, "secant");
    auto mem = testing::random_memory(s, 6, 4, 4);
    const auto& last = mem.pairs().back();
    const Vector hy = two_loop_direction(mem, 1.7, last.y_bar);
    CHECK(testing::rel_err(hy, last.s) < 1e-10);
}

TEST_CASE("multiplication count of the full procedure is (4p+6)n")
{
    rng::Stream s(5, "mults");
    for (std::size_t p : {1u, 3u, 10u}) {
        const std::size_t n = 17;
        LbfgsMemory mem(p);
        Vector x_prev = testing::random_vector(s, n);
        Vector g_prev = testing::random_vector(s, n);
        // Fill the memory so the loops run over p pairs.
        for (std::size_t j = 0; j < p + 1; ++j) {
            const Vector x = testing::random_vector(s, n);
            const Vector g = testing::random_vector(s, n);
            update(mem, x_prev, x, g_prev, g);
            x_prev = x;
            g_prev = g;
        }
        REQUIRE(mem.size() == p);
        MulCounter c;
        const Vector x = testing::random_vector(s, n);
        const Vector g = testing::random_vector(s, n);
        const auto ev = update(mem, x_prev, x, g_prev, g, &c);
        REQUIRE(ev.outcome == UpdateOutcome::pushed);
        two_loop_direction(mem, mem.current_gamma(), g, &c);
        CHECK(c.mults == (4 * p + 6) * n);
    }
}

TEST_CASE("update refreshes gamma before damping")
{
    LbfgsMemory mem(3);
    // s = (1, 0), y = (2, 0): gamma = 2, s'y = 2 >= 0.25*2*1, no damping.
    const auto ev = update(mem, Vector{0, 0}, Vector{1, 0}, Vector{0, 0}, Vector{2, 0});
    CHECK(ev.outcome == UpdateOutcome::pushed);
    CHECK(ev.gamma == 2.0);
    CHECK(mem.current_gamma() == 2.0);
    CHECK_FALSE(ev.damped);
    // Negative curvature: gamma falls back to delta and the pair is damped.
    const auto neg = update(mem, Vector{1, 0}, Vector{2, 0}, Vector{0, 0}, Vector{-1, 0});
    CHECK(neg.negative_curvature);
    CHECK(neg.damped);
    CHECK(neg.gamma == kDefaultDelta);
    CHECK(mem.pairs().back().gamma_at_creation == kDefaultDelta);
    CHECK(num::dot(mem.pairs().back().s, mem.pairs().back().y_bar) ==
          doctest::Approx(0.25 * kDefaultDelta));
}

TEST_CASE("zero steps leave the memory untouched")
{
    LbfgsMemory mem(3, 0.01, 5.0);
    const auto ev = update(mem, Vector{1, 1}, Vector{1, 1}, Vector{0, 0}, Vector{3, 3});
    CHECK(ev.outcome == UpdateOutcome::skipped_zero_step);
    CHECK(mem.empty());
    CHECK(mem.current_gamma() == 5.0);
}

TEST_CASE("quadratic with hessian 2I gives gamma 2 and exact pairs")
{
    QuadraticSumProblem q(3, {Vector{2, 0, 0, 0, 2, 0, 0, 0, 2}}, {Vector{1, -1, 0}});
    LbfgsMemory mem(5);
    Vector x0{1, 2, 3}, x1{0.5, 2.5, 2};
    Vector g0(3), g1(3);
    const std::vector<std::size_t> idx{0};
    q.mean_gradient(x0, idx, g0);
    q.mean_gradient(x1, idx, g1);
    const auto ev = update(mem, x0, x1, g0, g1);
    CHECK(ev.gamma == doctest::Approx(2.0));
    CHECK_FALSE(ev.damped);
    // H * (2 s) = s on the stored direction.
    const auto& pr = mem.pairs().back();
    const Vector d = two_loop_direction(mem, ev.gamma, pr.y_bar);
    CHECK(testing::rel_err(d, pr.s) < 1e-12);
}

TEST_CASE("memory dump is one line per call")
{
    rng::Stream s(6, "dump");
    auto mem = testing::random_memory(s, 3, 2, 2);
    std::ostringstream out;
    dump_state(out, mem, 7);
    const std::string line = out.str();
    CHECK(line.rfind("iteration=7 ", 0) == 0);
    CHECK(line.find("pairs=2") != std::string::npos);
    CHECK(std::count(line.begin(), line.end(), '\n') == 1);
}
