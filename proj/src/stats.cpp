#include "perfsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "perfsim/errors.hpp"

namespace perfsim::stats {

namespace {

constexpr int kMaxIterations = 10000;
constexpr double kTiny = 1e-300;
constexpr double kRelTol = 1e-16;

// Lower series: P(a, x).
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxIterations; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kRelTol) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
double gamma_q_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kRelTol) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
  if (!(a > 0.0)) throw InvalidArgument("gamma_q: a must be > 0");
  if (std::isnan(x) || x < 0.0) throw InvalidArgument("gamma_q: x must be >= 0");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return std::clamp(1.0 - gamma_p_series(a, x), 0.0, 1.0);
  return std::clamp(gamma_q_fraction(a, x), 0.0, 1.0);
}

double chi_squared_upper_tail(double statistic, double dof) {
  if (!(dof > 0.0)) return 1.0;
  return gamma_q(dof / 2.0, statistic / 2.0);
}

GofReport chi_squared_gof(std::span<const std::uint64_t> counts, std::span<const double> expected,
                          double significance) {
  if (counts.empty()) throw InvalidArgument("chi_squared_gof: no cells");
  if (counts.size() != expected.size()) {
    throw InvalidArgument("chi_squared_gof: " + std::to_string(counts.size()) + " counts vs " +
                          std::to_string(expected.size()) + " expected cells");
  }
  double mass = 0.0;
  for (double q : expected) {
    if (!(q >= 0.0) || !std::isfinite(q)) throw InvalidArgument("chi_squared_gof: bad expected cell");
    mass += q;
  }
  if (std::abs(mass - 1.0) > 1e-9) {
    throw InvalidArgument("chi_squared_gof: expected vector sums to " + std::to_string(mass));
  }
  const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  if (total == 0) throw InvalidArgument("chi_squared_gof: zero total count");
  const auto n = static_cast<double>(total);

  GofReport report;
  report.significance = significance;

  // Observed mass where none is possible: reject outright.
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (expected[i] == 0.0 && counts[i] > 0) {
      report.statistic = std::numeric_limits<double>::infinity();
      report.dof = static_cast<std::int64_t>(counts.size()) - 1;
      report.p_value = 0.0;
      report.pass = false;
      return report;
    }
  }

  struct Cell {
    double observed;
    double expected;
  };
  std::vector<Cell> cells;
  Cell pool{0.0, 0.0};
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const Cell cell{static_cast<double>(counts[i]), expected[i] * n};
    if (cell.expected >= 5.0) {
      cells.push_back(cell);
    } else {
      pool.observed += cell.observed;
      pool.expected += cell.expected;
    }
  }
  if (pool.expected > 0.0) {
    if (pool.expected >= 5.0 || cells.empty()) {
      cells.push_back(pool);
    } else {
      // Fold an undersized pool into the smallest regular cell.
      auto smallest = std::min_element(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
        return a.expected < b.expected;
      });
      smallest->observed += pool.observed;
      smallest->expected += pool.expected;
    }
  }

  double statistic = 0.0;
  for (const Cell& cell : cells) {
    const double diff = cell.observed - cell.expected;
    statistic += diff * diff / cell.expected;
  }
  report.statistic = statistic;
  report.dof = static_cast<std::int64_t>(cells.size()) - 1;
  report.p_value = chi_squared_upper_tail(statistic, static_cast<double>(report.dof));
  report.pass = report.p_value >= significance;
  return report;
}

bool majority_pass(std::span<const GofReport> reports) {
  const auto passed = std::count_if(reports.begin(), reports.end(),
                                    [](const GofReport& r) { return r.pass; });
  return 2 * static_cast<std::size_t>(passed) > reports.size();
}

MeanTest binomial_mean_test(std::uint64_t successes, std::uint64_t trials, double q0, double z) {
  if (trials == 0) throw InvalidArgument("binomial_mean_test: trials must be >= 1");
  if (successes > trials) throw InvalidArgument("binomial_mean_test: successes > trials");
  if (!(q0 >= 0.0 && q0 <= 1.0)) throw InvalidArgument("binomial_mean_test: q0 outside [0,1]");
  if (!(z > 0.0)) throw InvalidArgument("binomial_mean_test: z must be > 0");
  const double observed = static_cast<double>(successes) / static_cast<double>(trials);
  MeanTest test;
  test.deviation = std::abs(observed - q0);
  test.allowed = z * std::sqrt(q0 * (1.0 - q0) / static_cast<double>(trials));
  test.pass = (q0 == 0.0 || q0 == 1.0) ? test.deviation == 0.0 : test.deviation <= test.allowed;
  return test;
}

MeanTest mean_test(double mean, double stderr_mean, double target, double z) {
  if (!(z > 0.0)) throw InvalidArgument("mean_test: z must be > 0");
  MeanTest test;
  test.deviation = std::abs(mean - target);
  test.allowed = z * stderr_mean;
  test.pass = test.deviation <= test.allowed;
  return test;
}

MeanTest upper_bound_test(double mean, double stderr_mean, double bound, double z) {
  if (!(z > 0.0)) throw InvalidArgument("upper_bound_test: z must be > 0");
  MeanTest test;
  test.deviation = mean - bound;
  test.allowed = z * stderr_mean;
  test.pass = test.deviation <= test.allowed;
  return test;
}

double tv_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("tv_distance: length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return std::min(1.0, 0.5 * sum);
}

std::vector<double> empirical(std::span<const std::uint64_t> counts) {
  const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  if (total == 0) throw InvalidArgument("empirical: zero total count");
  std::vector<double> p(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    p[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  }
  return p;
}

double IntegerMoments::mean() const {
  return n == 0 ? 0.0 : static_cast<double>(sum) / static_cast<double>(n);
}

double IntegerMoments::variance() const {
  if (n < 2) return 0.0;
  const long double count = n;
  const long double m = static_cast<long double>(sum) / count;
  const long double v = (sum_sq - count * m * m) / (count - 1);
  return static_cast<double>(std::max<long double>(v, 0));
}

double IntegerMoments::stderr_mean() const {
  return n == 0 ? 0.0 : std::sqrt(variance() / static_cast<double>(n));
}

nlohmann::ordered_json to_json(const GofReport& report, std::string_view test, Seed seed) {
  nlohmann::ordered_json j;
  j["test"] = test;
  if (std::isfinite(report.statistic)) {
    j["statistic"] = report.statistic;
  } else {
    j["statistic"] = "inf";
  }
  j["dof"] = report.dof;
  j["p_value"] = report.p_value;
  j["pass"] = report.pass;
  j["seed"] = seed.value;
  return j;
}

}  // namespace perfsim::stats
