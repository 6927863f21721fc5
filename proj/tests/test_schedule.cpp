#include <cmath>

#include "doctest.h"
#include "sqnkit/errors.hpp"
#include "sqnkit/solvers.hpp"

using namespace sqnkit;

TEST_CASE("step schedules")
{
    StepSchedule d;
    CHECK(d.alpha(1) == 10.0);
    CHECK(d.alpha(4) == 2.5);
    StepSchedule c{ScheduleKind::constant, 0.3};
    CHECK(c.alpha(1000) == 0.3);
    StepSchedule t{ScheduleKind::decaying, 1.0, 0.75, 0.5, 2.0, 4.0};
    CHECK(t.alpha(1) == doctest::Approx(0.5 / 16.0));
    CHECK(t.alpha(16) == doctest::Approx(0.5 / 16.0 / 8.0));
    CHECK_THROWS_AS(d.alpha(0), ScheduleError);
    StepSchedule bad{ScheduleKind::decaying, 1.0, 0.4, 0.5, 2.0, 4.0};
    CHECK_THROWS_AS(bad.validate(), ScheduleError);
}

TEST_CASE("random output pmf under constant steps is uniform")
{
    const std::vector<double> alphas(8, 0.1);
    const auto pmf = random_output_pmf(alphas, 1.0, 1.0, 1.0);
    for (double p : pmf) CHECK(p == 0.125);
}

TEST_CASE("random output pmf example")
{
    // weights a - a^2/2 for L = kappa = 1: 0.5 - 0.125 = 0.375, 1 - 0.5 = 0.5
    const std::vector<double> alphas{0.5, 1.0};
    const auto pmf = random_output_pmf(alphas, 1.0, 1.0, 1.0);
    CHECK(pmf[0] == doctest::Approx(0.375 / 0.875));
    CHECK(pmf[1] == doctest::Approx(0.5 / 0.875));
}

TEST_CASE("random output pmf rejects steps above the bound")
{
    const std::vector<double> alphas{0.5, 2.5, 0.1};
    try {
        random_output_pmf(alphas, 1.0, 1.0, 1.0);
        FAIL("expected ScheduleError");
    } catch (const ScheduleError& e) {
        CHECK(std::string(e.what()).find("alpha_2") != std::string::npos);
    }
    const std::vector<double> on_bound{2.0, 2.0};
    CHECK_THROWS_AS(random_output_pmf(on_bound, 1.0, 1.0, 1.0), ScheduleError);
}

TEST_CASE("random output index frequencies follow the pmf")
{
    const std::vector<double> pmf{0.1, 0.2, 0.3, 0.4};
    std::vector<double> hits(4, 0.0);
    rng::Stream s(1, "output");
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) hits[random_output_index(pmf, s)] += 1.0;
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(hits[i] / draws - pmf[i]) <= 0.01);
}

namespace {

// Independent evaluation of the batch-size plan.
BatchPlan plan_oracle(double eps, double sigma, double L, double kl, double ku, double df,
                      double dt)
{
    const double c1 = 4 * sigma * ku * ku * df / (kl * kl * std::sqrt(dt)) + sigma * L * std::sqrt(dt);
    const double c2 = 4 * L * ku * ku * df / (kl * kl);
    const double nbar = std::ceil(std::max(c1 * c1 / (eps * eps) + 4 * c2 / eps,
                                           sigma * sigma / (L * L * dt)));
    const double m = std::ceil(std::min(nbar, std::max(1.0, sigma / L * std::sqrt(nbar / dt))));
    return {static_cast<std::uint64_t>(nbar), static_cast<std::uint64_t>(m)};
}

} // namespace

TEST_CASE("batch plan agrees with an independent evaluation")
{
    for (double eps : {0.5, 0.1, 0.01}) {
        for (double sigma : {0.1, 1.0, 10.0}) {
            const auto got = corollary34_batch_size(eps, sigma, 2.0, 0.5, 3.0, 1.5, 0.7);
            const auto want = plan_oracle(eps, sigma, 2.0, 0.5, 3.0, 1.5, 0.7);
            CHECK(got.total_sfo_calls == want.total_sfo_calls);
            CHECK(got.batch_size == want.batch_size);
            CHECK(got.batch_size >= 1);
            CHECK(got.batch_size <= got.total_sfo_calls);
        }
    }
    CHECK_THROWS_AS(corollary34_batch_size(0.0, 1, 1, 1, 1, 1, 1), ArgumentError);
}

TEST_CASE("variance-reduction parameters")
{
    const auto p = vr_parameters(8000, 50, 2.0, 1.0, 0.5);
    CHECK(p.alpha == doctest::Approx(0.5 * 50 / (2.0 * std::pow(8000.0, 2.0 / 3.0))));
    CHECK(p.inner == 106); // floor(8000 / 75)
    CHECK_THROWS_AS(vr_parameters(0, 50, 1, 1, 0.5), ArgumentError);
}
