#include <cmath>
#include <cstdint>

#include "doctest.h"
#include "perfsim/errors.hpp"
#include "perfsim/ruin.hpp"
#include "perfsim/stats.hpp"

using namespace perfsim;
using namespace perfsim::ruin;

namespace {
constexpr double kRs[] = {0.55, 0.6, 0.75, 0.9, 1.0};
constexpr std::int64_t kNs[] = {2, 5, 10, 50};
}  // namespace

TEST_CASE("oracle on small chains solved by hand") {
  CHECK(oracle_steps({0.7, 2, 1}) == doctest::Approx(1.0));
  // n = 3: t1 = 1 + r t2, t2 = 1 + (1-r) t1.
  for (double r : {0.3, 0.6, 0.9}) {
    CHECK(oracle_steps({r, 3, 1}) == doctest::Approx((1 + r) / (1 - r * (1 - r))).epsilon(1e-14));
  }
  CHECK(oracle_steps({1.0, 5, 1}) == doctest::Approx(4.0));
  CHECK(oracle_steps({0.6, 10, 0}) == 0.0);
  CHECK(oracle_steps({0.6, 10, 10}) == 0.0);
  CHECK(oracle_steps({0.6, 1, 1}) == 0.0);
}

TEST_CASE("closed form against the oracle") {
  for (double r : kRs) {
    for (std::int64_t n : kNs) {
      CHECK(std::abs(expected_steps(r, n) - oracle_steps({r, n, 1})) <= 1e-9);
    }
  }
  CHECK(std::abs(expected_steps(0.6, 10) - oracle_steps({0.6, 10, 1})) <= 1e-10);
  for (std::int64_t n : {1, 2, 7, 50}) CHECK(expected_steps(1.0, n) == doctest::Approx(n - 1));
  CHECK(expected_steps(0.8, 1) == 0.0);
}

TEST_CASE("upper bound (n - i)/(2r - 1)") {
  CHECK(steps_upper_bound({0.75, 20, 7}) == doctest::Approx(26.0));
  CHECK(oracle_steps({0.75, 20, 7}) <= 26.0);
  for (double r : {0.51, 0.55, 0.6, 0.75, 0.9, 1.0}) {
    for (std::int64_t n = 2; n <= 50; ++n) {
      for (std::int64_t i = 1; i < n; ++i) {
        const RuinChain chain{r, n, i};
        CHECK(oracle_steps(chain) <= steps_upper_bound(chain) * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("Monte Carlo agrees with the oracle") {
  const RuinChain points[] = {{0.55, 10, 1}, {0.6, 5, 1}, {0.75, 20, 7}, {0.9, 50, 1}, {0.6, 50, 25}};
  std::uint64_t seed = 100;
  for (const auto& chain : points) {
    const auto sim = simulate_steps(chain, 100'000, Seed{seed++});
    CHECK(sim.walks == 100'000);
    CHECK(stats::mean_test(sim.mean, sim.stderr_mean, oracle_steps(chain), 4.0).pass);
  }
}

TEST_CASE("flip-count bounds") {
  const double denom = (1 - std::exp(-3.55)) * (1 - 2 * std::exp(-1.775));
  CHECK(bf2_bound_coefficient() == doctest::Approx(3.55 / denom).epsilon(1e-15));
  CHECK(bf2_bound_coefficient() <= 5.53);
  CHECK(bf2_bound_coefficient() > 5.52);
  CHECK(bound_bf2(1.0, 1.0) == doctest::Approx(2 * 3.55 / denom));
  CHECK(bound_bf2(1.0, 1.0) == doctest::Approx(11.06).epsilon(1e-3));
  CHECK(bound_bf2_displayed(2.0, 0.1) == doctest::Approx(2.0 * 11.0 / denom));
  CHECK(prior_bound(1.0, 0.1) == doctest::Approx(95.0));
  CHECK(prior_bound(2.0, 0.5) == doctest::Approx(38.0));
  for (double c : {1.0, 2.0, 4.0}) {
    for (double eps : {0.01, 0.05, 0.1, 0.2, 0.3}) CHECK(prior_bound(c, eps) >= bound_bf2(c, eps));
  }
  // Leading ratio as eps -> 0.
  CHECK(bound_bf2(1.0, 1e-9) / prior_bound(1.0, 1e-9) == doctest::Approx(3.55 / denom / 9.5).epsilon(1e-8));

  CHECK_THROWS_AS(bound_bf2(0.5, 0.1), InvalidArgument);
  CHECK_THROWS_AS(bound_bf2(1.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(prior_bound(1.0, 1.5), InvalidArgument);
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(expected_steps(0.5, 10), InvalidArgument);
  CHECK_THROWS_AS(expected_steps(0.3, 10), InvalidArgument);
  CHECK_THROWS_AS(expected_steps(0.7, 0), InvalidArgument);
  CHECK_THROWS_AS(oracle_steps({0.0, 10, 1}), InvalidArgument);
  CHECK_THROWS_AS(oracle_steps({0.6, 10, 11}), InvalidArgument);
  CHECK_THROWS_AS(steps_upper_bound({0.5, 10, 1}), InvalidArgument);
  CHECK_THROWS_AS(simulate_steps({0.6, 10, 1}, 0, Seed{1}), InvalidArgument);
}
