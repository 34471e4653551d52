#pragma once

#include <cstdint>

#include "perfsim/prs.hpp"

namespace perfsim::bf {

/// Cutoff constant of the (Cp)^i factory: exponents above kCutoff/eps take
/// the thinning branch.
inline constexpr double kCutoff = 3.55;

/// Parameters of the (Cp)^i factory. The promise Cp <= 1 - eps cannot be
/// checked here because p is hidden behind the coin.
struct FactoryParams {
  double c = 1.0;
  std::int64_t i = 1;
  double eps = 0.5;

  /// Throws InvalidArgument unless c >= 1, i >= 0 and 0 < eps < 1.
  void validate() const;

  friend bool operator==(const FactoryParams&, const FactoryParams&) = default;
};

/// Derived per-eps constants.
struct FactoryConstants {
  double threshold;  // kCutoff / eps
  double beta;       // (1 - eps/2) / (1 - eps)

  static FactoryConstants for_eps(double eps);

  /// beta^(-i), evaluated as exp(-i log beta).
  double inverse_beta_power(std::int64_t i) const;
};

/// Bern(Cp / (1 + Cp)) from the coin: B ~ Bern(C/(1+C)) from the uniform
/// source; B = 0 returns 0, otherwise a coin flip of 1 returns 1 and a flip
/// of 0 recurses. The parameter is C. Throws InvalidArgument unless C > 0.
PrsSpec<double, int> bf1(double c);

/// Bern((Cp)^i). i = 0 returns 1. For i > kCutoff/eps, B1 ~ Bern(beta^-i)
/// and B1 = 1 recurses with (beta C, i, eps/2). Otherwise B2 = bf1(C) moves
/// the exponent to i + 1 - 2 B2 at the next level.
PrsSpec<FactoryParams, int> bf2(FactoryParams params);

/// Bern(Cp) as bf2(C, 1, eps).
PrsSpec<FactoryParams, int> linear_factory(double c, double eps);

}  // namespace perfsim::bf
