#pragma once

#include <cstdint>

#include "perfsim/rand.hpp"

namespace perfsim::ruin {

/// +-1 walk on {0..n}: up with probability r, down with 1 - r, absorbed at 0
/// and at n.
struct RuinChain {
  double r = 0.75;
  std::int64_t n = 10;
  std::int64_t start = 1;
};

/// Closed-form expected absorption time from state 1, valid for r > 1/2.
/// Throws InvalidArgument when r <= 1/2, r > 1 or n < 1.
double expected_steps(double r, std::int64_t n);

/// Expected absorption time from chain.start by solving (I - Q) t = 1 over
/// the transient states {1..n-1} with tridiagonal elimination.
/// Requires 0 < r <= 1, n >= 1 and 0 <= start <= n.
double oracle_steps(const RuinChain& chain);

/// (n - start) / (2r - 1), the upper bound on the expected absorption time.
double steps_upper_bound(const RuinChain& chain);

struct SimulatedSteps {
  double mean = 0.0;
  double stderr_mean = 0.0;
  std::uint64_t walks = 0;
};

/// Monte Carlo mean absorption time over `walks` independent walks.
SimulatedSteps simulate_steps(const RuinChain& chain, std::uint64_t walks, Seed seed);

/// Coefficient kCutoff / [(1 - e^-3.55)(1 - 2 e^-3.55/2)], about 5.529.
double bf2_bound_coefficient();

/// Expected-flip bound for the linear factory:
/// coefficient * C * (1 + 1/eps). Requires C >= 1 and 0 < eps <= 1.
double bound_bf2(double c, double eps);

/// The same bound without the leading 3.55 factor, i.e. the expression as
/// literally displayed: C (1 + 1/eps) / [(1 - e^-3.55)(1 - 2 e^-3.55/2)].
double bound_bf2_displayed(double c, double eps);

/// Bound of the earlier linear factory, 9.5 C / eps.
double prior_bound(double c, double eps);

}  // namespace perfsim::ruin
