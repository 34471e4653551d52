#include "perfsim/ruin.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "perfsim/bernoulli_factory.hpp"
#include "perfsim/errors.hpp"

namespace perfsim::ruin {

namespace {

void check_bound_domain(double c, double eps) {
  if (!(c >= 1.0) || !std::isfinite(c)) throw InvalidArgument("bound: C must be >= 1");
  // eps = 1 is outside the factory's domain but the expressions are finite
  // there, so the limit case is accepted.
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidArgument("bound: eps must lie in (0,1]");
}

double bound_denominator() {
  return (1.0 - std::exp(-bf::kCutoff)) * (1.0 - 2.0 * std::exp(-bf::kCutoff / 2.0));
}

}  // namespace

double expected_steps(double r, std::int64_t n) {
  if (!(r > 0.5 && r <= 1.0)) {
    throw InvalidArgument("expected_steps: closed form needs 1/2 < r <= 1, got " +
                          std::to_string(r));
  }
  if (n < 1) throw InvalidArgument("expected_steps: n must be >= 1");
  const double rho = (1.0 - r) / r;
  const double drift = 2.0 * r - 1.0;
  const double ratio = (1.0 - rho) / (1.0 - std::pow(rho, static_cast<double>(n)));
  return static_cast<double>(n) / drift * ratio - 1.0 / drift;
}

double oracle_steps(const RuinChain& chain) {
  const double r = chain.r;
  const std::int64_t n = chain.n;
  if (!(r > 0.0 && r <= 1.0)) throw InvalidArgument("oracle_steps: r must lie in (0,1]");
  if (n < 1) throw InvalidArgument("oracle_steps: n must be >= 1");
  if (chain.start < 0 || chain.start > n) throw InvalidArgument("oracle_steps: start outside {0..n}");
  if (chain.start == 0 || chain.start == n) return 0.0;

  // Transient states 1..n-1 mapped to rows 0..m-1:
  //   -(1-r) t[k-1] + t[k] - r t[k+1] = 1.
  const auto m = static_cast<std::size_t>(n - 1);
  const double lower = -(1.0 - r);
  const double upper = -r;
  std::vector<double> c_prime(m, 0.0);
  std::vector<double> d_prime(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    const double denom = 1.0 - (k > 0 ? lower * c_prime[k - 1] : 0.0);
    if (std::abs(denom) < 1e-300) throw NumericError("oracle_steps: singular system");
    c_prime[k] = upper / denom;
    d_prime[k] = (1.0 - (k > 0 ? lower * d_prime[k - 1] : 0.0)) / denom;
  }
  std::vector<double> t(m, 0.0);
  t[m - 1] = d_prime[m - 1];
  for (std::size_t k = m - 1; k-- > 0;) t[k] = d_prime[k] - c_prime[k] * t[k + 1];
  return t[static_cast<std::size_t>(chain.start - 1)];
}

double steps_upper_bound(const RuinChain& chain) {
  if (!(chain.r > 0.5)) throw InvalidArgument("steps_upper_bound: needs r > 1/2");
  return static_cast<double>(chain.n - chain.start) / (2.0 * chain.r - 1.0);
}

SimulatedSteps simulate_steps(const RuinChain& chain, std::uint64_t walks, Seed seed) {
  if (walks == 0) throw InvalidArgument("simulate_steps: walks must be >= 1");
  if (!(chain.r >= 0.0 && chain.r <= 1.0)) throw InvalidArgument("simulate_steps: r outside [0,1]");
  if (chain.n < 1 || chain.start < 0 || chain.start > chain.n) {
    throw InvalidArgument("simulate_steps: start outside {0..n}");
  }
  UniformSource src(seed);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::uint64_t w = 0; w < walks; ++w) {
    std::int64_t state = chain.start;
    std::uint64_t steps = 0;
    while (state != 0 && state != chain.n) {
      state += src.unit() < chain.r ? 1 : -1;
      ++steps;
    }
    const auto s = static_cast<double>(steps);
    sum += s;
    sum_sq += s * s;
  }
  const auto count = static_cast<double>(walks);
  const double mean = sum / count;
  const double variance = walks > 1 ? (sum_sq - count * mean * mean) / (count - 1.0) : 0.0;
  return {mean, std::sqrt(std::max(variance, 0.0) / count), walks};
}

double bf2_bound_coefficient() { return bf::kCutoff / bound_denominator(); }

double bound_bf2(double c, double eps) {
  check_bound_domain(c, eps);
  return bf2_bound_coefficient() * c * (1.0 + 1.0 / eps);
}

double bound_bf2_displayed(double c, double eps) {
  check_bound_domain(c, eps);
  return c * (1.0 + 1.0 / eps) / bound_denominator();
}

double prior_bound(double c, double eps) {
  check_bound_domain(c, eps);
  return 9.5 * c / eps;
}

}  // namespace perfsim::ruin
