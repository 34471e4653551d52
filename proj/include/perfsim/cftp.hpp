#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "perfsim/prs.hpp"

namespace perfsim::cftp {

/// One primitive piece of randomness: a direction (uniform over the update's
/// directions) and a uniform on [0,1).
struct Primitive {
  std::uint32_t direction = 0;
  double u = 0.0;
};

/// Randomness for parameter alpha: alpha iid primitives, applied in order.
using Randomness = std::vector<Primitive>;

/// u < upper moves to `next`; pieces of a state are ordered by `upper`, the
/// last one ends at 1.
struct Piece {
  double upper;
  std::size_t next;
};

/// Maps the parameter of one level to the parameter of the next level.
using Schedule = std::function<std::size_t(std::size_t)>;

Schedule doubling_schedule();
Schedule increment_schedule();

/// A deterministic map on states together with its probability under one
/// primitive of randomness.
struct WeightedMap {
  std::vector<std::size_t> image;
  double weight = 0.0;
};

/// Update function on a finite state space, given as a piecewise-constant
/// move table per (direction, state). The table form keeps the transition
/// kernel and the coalescence probabilities exactly computable.
class UpdateSpec {
 public:
  /// moves[d][x] lists the pieces for direction d at state x. Throws
  /// InvalidArgument on malformed tables.
  UpdateSpec(std::vector<std::string> states, std::vector<std::vector<std::vector<Piece>>> moves,
             Schedule schedule = doubling_schedule());

  std::size_t size() const noexcept { return states_.size(); }
  std::size_t directions() const noexcept { return moves_.size(); }
  const std::vector<std::string>& states() const noexcept { return states_; }

  std::size_t step(std::size_t x, const Primitive& r) const;
  std::size_t apply(std::size_t x, std::span<const Primitive> r) const;

  /// alpha primitives from P_alpha.
  Randomness draw(UniformSource& src, std::size_t alpha) const;

  std::size_t next_parameter(std::size_t alpha) const { return schedule_(alpha); }

  UpdateSpec with_schedule(Schedule schedule) const;

  /// Single-primitive transition matrix, computed exactly from the move table.
  std::vector<std::vector<double>> kernel() const;

  /// The distinct state maps a single primitive can induce, with their
  /// probabilities.
  std::vector<WeightedMap> elementary_maps() const;

 private:
  std::vector<std::string> states_;
  std::vector<std::vector<std::vector<Piece>>> moves_;
  Schedule schedule_;
};

struct CouplingCertificate {
  bool coalesced = false;
  std::optional<std::size_t> image;  // set iff coalesced
};

/// Applies r to every state; coalesced exactly when all images agree.
CouplingCertificate detect_coupling(const UpdateSpec& update, std::span<const Primitive> r);

/// Probability that a block of `block_length` primitives completely couples,
/// by exact enumeration of composed elementary maps.
double coalescence_probability(const UpdateSpec& update, std::size_t block_length);

/// Largest block length the sampler will draw before giving up with
/// DepthExceeded.
inline constexpr std::size_t kDefaultMaxBlock = std::size_t{1} << 20;

/// Coupling from the past as a recursive scheme over the block length alpha:
/// draw R ~ P_alpha; if R coalesces return its image, otherwise obtain Y from
/// the call with f(alpha) and return apply(Y, R). The deeper (older) blocks
/// are applied first and the level-0 block last.
PrsSpec<std::size_t, std::size_t> cftp_run(std::shared_ptr<const UpdateSpec> update,
                                           std::size_t alpha0,
                                           std::size_t max_block = kDefaultMaxBlock);

/// Solves pi K = pi, sum(pi) = 1. Throws NoUniqueStationary when the kernel
/// has more than one closed class.
std::vector<double> stationary_exact(const UpdateSpec& update);

/// max_y |(pi K)(y) - pi(y)|.
double verify_stationarity(const UpdateSpec& update, std::span<const double> pi);

/// Metropolis walk on {0..k-1} targeting pi proportional to `weights`:
/// propose x-1 or x+1 with probability 1/2 each (staying put off the ends),
/// accept when u < pi(y)/pi(x).
UpdateSpec metropolis_walk(const std::vector<double>& weights);

/// Metropolis walk for pi proportional to (1,2,3).
UpdateSpec walk3();

/// Symmetric lazy walk on {0..k-1}: move in the drawn direction when u < 1/2
/// and the move stays in range, otherwise hold.
UpdateSpec lazy_walk(std::size_t k);

/// Inverse-CDF update for an arbitrary row-stochastic matrix (one direction).
UpdateSpec kernel_chain(std::vector<std::string> states,
                        const std::vector<std::vector<double>>& kernel);

/// Kernel [[0.9, 0.1], [0.2, 0.8]].
UpdateSpec two_state();

/// {"states": [labels...], "kernel": [[row]...]}; "states" is optional.
UpdateSpec chain_from_json(const nlohmann::json& doc);

}  // namespace perfsim::cftp
