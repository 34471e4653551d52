#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>

#include "perfsim/density.hpp"
#include "perfsim/prs.hpp"

namespace perfsim::ar {

/// Draw uniformly from {1..10}; return the draw if it is at most 5, otherwise
/// recurse with the same parameter. Output is uniform on {1..5}.
PrsSpec<std::int64_t, std::int64_t> basic();

/// Draw uniformly from {1..max(5, alpha)}; accept a draw <= 5, otherwise
/// recurse with the rejected draw as the new parameter. Output is uniform on
/// {1..5} for every alpha >= 1. Throws InvalidArgument when alpha0 < 1.
PrsSpec<std::int64_t, std::int64_t> adaptive_param(std::int64_t alpha0);

using EnvelopeHandle = std::shared_ptr<const EnvelopePair>;

/// Rejection from a fixed envelope: X ~ g, U ~ [0,1), accept when
/// U < h(X)/g(X), else recurse with the same envelope. Output is a domain index.
PrsSpec<EnvelopeHandle, std::size_t> general(EnvelopePair pair);

/// Produces the envelope for the next attempt from the current pair and the
/// rejected point. The result must keep the same target and satisfy
/// h <= g_a <= g.
using AdaptiveEnvelopeRule = std::function<EnvelopePair(const EnvelopePair&, std::size_t)>;

/// Leaves the envelope unchanged (degenerates to general()).
AdaptiveEnvelopeRule identity_rule();

/// Lowers g at the rejected point to max(h(x), g(x)/2).
AdaptiveEnvelopeRule halve_at_rejection_rule();

/// Throws EnvelopeViolation unless `refined` has the same target as
/// `current` and h <= g_a <= g pointwise.
void check_refinement(const EnvelopePair& current, const EnvelopePair& refined);

/// As general(), but each rejection refines the envelope with `rule`, and
/// every refinement is validated with check_refinement before recursing.
PrsSpec<EnvelopeHandle, std::size_t> adaptive_envelope(EnvelopePair initial,
                                                       AdaptiveEnvelopeRule rule);

/// The pair used by the shipped examples: h = (1,2,3), g = (2,2,4).
EnvelopePair example_pair();

}  // namespace perfsim::ar
