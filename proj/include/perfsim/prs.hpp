#pragma once

// Probabilistic recursive schemes.
//
// A scheme is a body that, given a parameter and the randomness sources,
// either finishes with a value or asks for a recursive call with a new
// parameter plus a continuation mapping the recursive result to its own
// result. The engine drives bodies from an explicit stack, so it always knows
// the recursion level and can answer the calls made at a chosen level with an
// exact oracle instead of recursing (the truncated run).

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "perfsim/errors.hpp"
#include "perfsim/rand.hpp"

namespace perfsim {

/// Randomness owned by one run: a uniform source and, for factories, a coin.
struct Sources {
  explicit Sources(Seed seed) : uniform(seed) {}

  /// Uniform source and coin on two independent children of `seed`.
  Sources(Seed seed, double coin_p)
      : uniform(derive_stream(seed, 0)), coin(std::in_place, coin_p, derive_stream(seed, 1)) {}

  CoinStream& coin_stream() {
    if (!coin) throw InvalidArgument("this scheme needs a coin stream but none was supplied");
    return *coin;
  }

  std::uint64_t coin_flips() const noexcept { return coin ? coin->flips() : 0; }

  UniformSource uniform;
  std::optional<CoinStream> coin;
};

template <class Param, class Out>
struct Step;

/// Maps the result of a recursive call to this level's next step. An empty
/// continuation means "return the recursive result unchanged".
template <class Param, class Out>
using Continuation = std::function<Step<Param, Out>(Out, Sources&)>;

template <class Param, class Out>
struct Step {
  struct Call {
    Param param;
    Continuation<Param, Out> then;
  };

  static Step done(Out value) { return Step{std::move(value)}; }
  static Step call(Param param, Continuation<Param, Out> then = {}) {
    return Step{Call{std::move(param), std::move(then)}};
  }

  bool is_call() const noexcept { return std::holds_alternative<Call>(state); }

  std::variant<Out, Call> state;
};

template <class Param, class Out>
struct PrsSpec {
  using param_type = Param;
  using output_type = Out;
  using Body = std::function<Step<Param, Out>(const Param&, Sources&)>;

  Body body;
  Param initial;
};

struct TerminationGuard {
  std::size_t max_depth = 1'000'000;
};

struct RunTrace {
  std::size_t max_level = 0;
  std::uint64_t uniform_draws = 0;
  std::uint64_t coin_flips = 0;
};

template <class Out>
struct RunResult {
  Out output;
  RunTrace trace;
};

/// Exact sampler for the target of the call with the given parameter. Owns
/// its own randomness; may throw OracleUnavailable.
template <class Param, class Out>
using Oracle = std::function<Out(const Param&)>;

/// Called with (level, parameter) each time a body starts.
template <class Param>
using CallObserver = std::function<void(std::size_t, const Param&)>;

namespace detail {

template <class Param, class Out>
RunResult<Out> execute(const PrsSpec<Param, Out>& spec, const Param& param, Sources& sources,
                       const TerminationGuard& guard, std::optional<std::size_t> oracle_level,
                       const Oracle<Param, Out>* oracle, const CallObserver<Param>* observer) {
  if (guard.max_depth < 1) throw InvalidArgument("termination guard needs max_depth >= 1");

  const std::uint64_t draws_before = sources.uniform.draws();
  const std::uint64_t flips_before = sources.coin_flips();

  using StepT = Step<Param, Out>;
  using Call = typename StepT::Call;

  // Only non-empty continuations are stacked, each with the level of the body
  // that registered it. Identity frames pass values straight through, so
  // long tail-recursive runs need no stack.
  struct Frame {
    std::size_t level;
    Continuation<Param, Out> then;
  };
  std::vector<Frame> pending;
  std::size_t level = 0;
  std::size_t max_level = 0;

  if (observer && *observer) (*observer)(0, param);
  StepT step = spec.body(param, sources);

  for (;;) {
    if (auto* call = std::get_if<Call>(&step.state)) {
      if (oracle_level && level == *oracle_level) {
        if (!oracle || !*oracle) {
          throw OracleUnavailable("truncated run reached level " + std::to_string(level) +
                                  " without an oracle");
        }
        Out answer = (*oracle)(call->param);
        step = call->then ? call->then(std::move(answer), sources) : StepT::done(std::move(answer));
        continue;
      }
      if (level + 1 > guard.max_depth) {
        throw DepthExceeded("recursion level would exceed max_depth = " +
                            std::to_string(guard.max_depth));
      }
      Param next = std::move(call->param);
      if (call->then) pending.push_back({level, std::move(call->then)});
      ++level;
      max_level = std::max(max_level, level);
      if (observer && *observer) (*observer)(level, next);
      step = spec.body(next, sources);
      continue;
    }

    if (pending.empty()) {
      RunTrace trace{max_level, sources.uniform.draws() - draws_before,
                     sources.coin_flips() - flips_before};
      return RunResult<Out>{std::move(std::get<Out>(step.state)), trace};
    }
    Frame frame = std::move(pending.back());
    pending.pop_back();
    level = frame.level;
    step = frame.then(std::move(std::get<Out>(step.state)), sources);
  }
}

}  // namespace detail

/// Fully recursive execution. Throws DepthExceeded past guard.max_depth.
template <class Param, class Out>
RunResult<Out> run(const PrsSpec<Param, Out>& spec, const Param& param, Sources& sources,
                   const TerminationGuard& guard = {},
                   const CallObserver<Param>& observer = {}) {
  return detail::execute<Param, Out>(spec, param, sources, guard, std::nullopt, nullptr,
                                     &observer);
}

template <class Param, class Out>
RunResult<Out> run(const PrsSpec<Param, Out>& spec, Sources& sources,
                   const TerminationGuard& guard = {},
                   const CallObserver<Param>& observer = {}) {
  return run(spec, spec.initial, sources, guard, observer);
}

/// Truncated execution: calls below level n recurse as usual, every recursive
/// request issued by a body running at level n is answered by a fresh oracle
/// draw. The trace's max_level is therefore at most n.
template <class Param, class Out>
RunResult<Out> run_truncated(const PrsSpec<Param, Out>& spec, const Param& param, std::size_t n,
                             const Oracle<Param, Out>& oracle, Sources& sources,
                             const TerminationGuard& guard = {},
                             const CallObserver<Param>& observer = {}) {
  return detail::execute<Param, Out>(spec, param, sources, guard, n, &oracle, &observer);
}

template <class Param, class Out>
RunResult<Out> run_truncated(const PrsSpec<Param, Out>& spec, std::size_t n,
                             const Oracle<Param, Out>& oracle, Sources& sources,
                             const TerminationGuard& guard = {}) {
  return run_truncated(spec, spec.initial, n, oracle, sources, guard);
}

template <class Out>
struct CoupledOutcome {
  Out full;        // X, the fully recursive output
  Out truncated;   // Y_n
  std::size_t depth = 0;  // T of the full run
};

/// Runs the full and the level-n truncated execution on copies of the same
/// randomness. When depth <= n the truncated run never consults its oracle,
/// so full == truncated.
template <class Param, class Out>
CoupledOutcome<Out> coupled_compare(const PrsSpec<Param, Out>& spec, const Param& param,
                                    std::size_t n, const Oracle<Param, Out>& oracle,
                                    const Sources& randomness, const TerminationGuard& guard = {}) {
  Sources full_sources = randomness;
  Sources truncated_sources = randomness;
  auto full = run(spec, param, full_sources, guard);
  auto truncated = run_truncated(spec, param, n, oracle, truncated_sources, guard);
  return {std::move(full.output), std::move(truncated.output), full.trace.max_level};
}

template <class Param, class Out>
CoupledOutcome<Out> coupled_compare(const PrsSpec<Param, Out>& spec, const Param& param,
                                    std::size_t n, const Oracle<Param, Out>& oracle, Seed seed,
                                    const TerminationGuard& guard = {}) {
  return coupled_compare(spec, param, n, oracle, Sources(seed), guard);
}

}  // namespace perfsim
