#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "perfsim/rand.hpp"

namespace perfsim::stats {

inline constexpr double kDefaultSignificance = 1e-3;

struct GofReport {
  double statistic = 0.0;
  std::int64_t dof = 0;
  double p_value = 1.0;
  bool pass = true;
  double significance = kDefaultSignificance;
};

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a),
/// series for x < a + 1 and a continued fraction otherwise.
double gamma_q(double a, double x);

/// P(chi^2_dof >= statistic).
double chi_squared_upper_tail(double statistic, double dof);

/// Pearson goodness of fit of `counts` against the probability vector
/// `expected`. Cells with expected count below 5 are pooled. A nonzero count
/// in a zero-probability cell yields statistic = inf and p = 0.
/// Throws InvalidArgument on empty/zero counts, length mismatch or an
/// expected vector that does not sum to 1 within 1e-9.
GofReport chi_squared_gof(std::span<const std::uint64_t> counts, std::span<const double> expected,
                          double significance = kDefaultSignificance);

/// Two of three (or generally more than half) of the reports pass.
bool majority_pass(std::span<const GofReport> reports);

struct MeanTest {
  bool pass = false;
  double deviation = 0.0;  // |observed - target|
  double allowed = 0.0;    // z * standard error
};

/// |successes/trials - q0| <= z sqrt(q0 (1 - q0) / trials); q0 in {0, 1}
/// demands an exact match.
MeanTest binomial_mean_test(std::uint64_t successes, std::uint64_t trials, double q0, double z);

/// |mean - target| <= z * stderr_mean.
MeanTest mean_test(double mean, double stderr_mean, double target, double z);

/// One-sided: mean <= bound + z * stderr_mean.
MeanTest upper_bound_test(double mean, double stderr_mean, double bound, double z);

/// (1/2) sum |a - b| for two probability vectors on the same outcomes.
double tv_distance(std::span<const double> a, std::span<const double> b);

/// Counts divided by their total.
std::vector<double> empirical(std::span<const std::uint64_t> counts);

/// Running sums of a nonnegative integer quantity (flips, recursion levels).
/// Integer sums make merged results independent of the merge order.
struct IntegerMoments {
  std::uint64_t n = 0;
  std::uint64_t sum = 0;
  long double sum_sq = 0;

  void add(std::uint64_t v) {
    ++n;
    sum += v;
    sum_sq += static_cast<long double>(v) * static_cast<long double>(v);
  }
  void merge(const IntegerMoments& other) {
    n += other.n;
    sum += other.sum;
    sum_sq += other.sum_sq;
  }
  double mean() const;
  double variance() const;  // unbiased
  double stderr_mean() const;
};

/// {test, statistic, dof, p_value, pass, seed}
nlohmann::ordered_json to_json(const GofReport& report, std::string_view test, Seed seed);

}  // namespace perfsim::stats
