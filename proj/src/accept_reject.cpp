#include "perfsim/accept_reject.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "perfsim/errors.hpp"

namespace perfsim::ar {

namespace {

using IntStep = Step<std::int64_t, std::int64_t>;
using PointStep = Step<EnvelopeHandle, std::size_t>;

// One attempt of rejection sampling; nullopt on rejection.
std::optional<std::size_t> attempt(const EnvelopePair& pair, UniformSource& src,
                                   std::size_t& drawn) {
  drawn = pair.envelope().sample(src);
  const double g = pair.envelope().weight(drawn);
  if (g <= 0.0) throw std::logic_error("rejection sampler drew a point with g(x) = 0");
  const double u = src.unit();
  if (u < pair.target().weight(drawn) / g) return drawn;
  return std::nullopt;
}

}  // namespace

PrsSpec<std::int64_t, std::int64_t> basic() {
  return {[](const std::int64_t& alpha, Sources& s) {
            const std::int64_t x = s.uniform.uniform_int(1, 10);
            if (x <= 5) return IntStep::done(x);
            return IntStep::call(alpha);
          },
          0};
}

PrsSpec<std::int64_t, std::int64_t> adaptive_param(std::int64_t alpha0) {
  if (alpha0 < 1) {
    throw InvalidArgument("adaptive_param: alpha0 must be a positive integer, got " +
                          std::to_string(alpha0));
  }
  return {[](const std::int64_t& alpha, Sources& s) {
            const std::int64_t x = s.uniform.uniform_int(1, std::max<std::int64_t>(5, alpha));
            if (x <= 5) return IntStep::done(x);
            return IntStep::call(x);
          },
          alpha0};
}

PrsSpec<EnvelopeHandle, std::size_t> general(EnvelopePair pair) {
  return {[](const EnvelopeHandle& e, Sources& s) {
            std::size_t x = 0;
            if (auto accepted = attempt(*e, s.uniform, x)) return PointStep::done(*accepted);
            return PointStep::call(e);
          },
          std::make_shared<const EnvelopePair>(std::move(pair))};
}

AdaptiveEnvelopeRule identity_rule() {
  return [](const EnvelopePair& current, std::size_t) { return current; };
}

AdaptiveEnvelopeRule halve_at_rejection_rule() {
  return [](const EnvelopePair& current, std::size_t x) {
    std::vector<double> g = current.envelope().weights();
    g[x] = std::max(current.target().weight(x), g[x] / 2.0);
    return EnvelopePair(current.target(), FiniteDensity(current.envelope().labels(), std::move(g)));
  };
}

void check_refinement(const EnvelopePair& current, const EnvelopePair& refined) {
  const auto& h = current.target();
  if (refined.target().weights() != h.weights() || refined.target().labels() != h.labels()) {
    throw EnvelopeViolation("adaptive envelope: refinement changed the target density");
  }
  const auto& g = current.envelope();
  const auto& ga = refined.envelope();
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h.weight(i) <= ga.weight(i) && ga.weight(i) <= g.weight(i))) {
      throw EnvelopeViolation("adaptive envelope: g_a(" + h.labels()[i] + ") = " +
                              std::to_string(ga.weight(i)) + " outside [h, g] = [" +
                              std::to_string(h.weight(i)) + ", " + std::to_string(g.weight(i)) +
                              "]");
    }
  }
}

PrsSpec<EnvelopeHandle, std::size_t> adaptive_envelope(EnvelopePair initial,
                                                       AdaptiveEnvelopeRule rule) {
  return {[rule = std::move(rule)](const EnvelopeHandle& e, Sources& s) {
            std::size_t x = 0;
            if (auto accepted = attempt(*e, s.uniform, x)) return PointStep::done(*accepted);
            EnvelopePair refined = rule(*e, x);
            check_refinement(*e, refined);
            return PointStep::call(std::make_shared<const EnvelopePair>(std::move(refined)));
          },
          std::make_shared<const EnvelopePair>(std::move(initial))};
}

EnvelopePair example_pair() {
  return EnvelopePair(FiniteDensity({1.0, 2.0, 3.0}), FiniteDensity({2.0, 2.0, 4.0}));
}

}  // namespace perfsim::ar
