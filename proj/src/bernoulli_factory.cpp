#include "perfsim/bernoulli_factory.hpp"

#include <cmath>
#include <string>

#include "perfsim/errors.hpp"

namespace perfsim::bf {

namespace {

using BitStep = Step<double, int>;
using FactoryStep = Step<FactoryParams, int>;

Step<double, int> bf1_body(const double& c, Sources& s) {
  if (!s.uniform.bernoulli(c / (1.0 + c))) return BitStep::done(0);
  if (s.coin_stream().flip()) return BitStep::done(1);
  return BitStep::call(c);
}

// The same draws as a full bf1 run, without the engine: bf1 only ever
// recurses in tail position.
int bf1_bit(double c, Sources& s) {
  const double q = c / (1.0 + c);
  for (;;) {
    if (!s.uniform.bernoulli(q)) return 0;
    if (s.coin_stream().flip()) return 1;
  }
}

}  // namespace

void FactoryParams::validate() const {
  if (!(c >= 1.0) || !std::isfinite(c)) {
    throw InvalidArgument("factory: C must be a finite real >= 1, got " + std::to_string(c));
  }
  if (i < 0) throw InvalidArgument("factory: i must be >= 0, got " + std::to_string(i));
  if (!(eps > 0.0 && eps < 1.0)) {
    throw InvalidArgument("factory: eps must lie in (0,1), got " + std::to_string(eps));
  }
}

FactoryConstants FactoryConstants::for_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw InvalidArgument("factory: eps must lie in (0,1), got " + std::to_string(eps));
  }
  return {kCutoff / eps, (1.0 - eps / 2.0) / (1.0 - eps)};
}

double FactoryConstants::inverse_beta_power(std::int64_t i) const {
  return std::exp(-static_cast<double>(i) * std::log(beta));
}

PrsSpec<double, int> bf1(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw InvalidArgument("bf1: C must be a finite real > 0, got " + std::to_string(c));
  }
  return {bf1_body, c};
}

PrsSpec<FactoryParams, int> bf2(FactoryParams params) {
  params.validate();
  return {[](const FactoryParams& at, Sources& s) {
            if (at.i == 0) return FactoryStep::done(1);
            const auto constants = FactoryConstants::for_eps(at.eps);
            if (static_cast<double>(at.i) > constants.threshold) {
              if (!s.uniform.bernoulli(constants.inverse_beta_power(at.i))) {
                return FactoryStep::done(0);
              }
              return FactoryStep::call({constants.beta * at.c, at.i, at.eps / 2.0});
            }
            const int b2 = bf1_bit(at.c, s);
            return FactoryStep::call({at.c, at.i + 1 - 2 * b2, at.eps});
          },
          params};
}

PrsSpec<FactoryParams, int> linear_factory(double c, double eps) {
  return bf2({c, 1, eps});
}

}  // namespace perfsim::bf
