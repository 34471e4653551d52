#pragma once

#include <array>
#include <cstdint>

namespace perfsim {

/// 64-bit seed. Identical seeds and identical call sequences replay
/// bit-identical output.
struct Seed {
  std::uint64_t value = 0;

  friend bool operator==(Seed, Seed) = default;
};

/// splitmix64 output function. Used for seeding and stream derivation.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Child seed for replicate `index` of `seed`. Children are pure functions of
/// (seed, index), so replicates never share generator state.
Seed derive_stream(Seed seed, std::uint64_t index) noexcept;

/// xoshiro256** generator with an exact count of the draws made through it.
///
/// Every public draw (unit, uniform_int, bernoulli) counts as exactly one
/// draw, whatever number of raw 64-bit words it consumed internally.
class UniformSource {
 public:
  explicit UniformSource(Seed seed) noexcept;

  /// Uniform on [0,1) with 53 bits of resolution.
  double unit() noexcept;

  /// Uniform on {a, ..., b}; rejection removes modulo bias.
  /// Throws InvalidArgument when a > b.
  std::int64_t uniform_int(std::int64_t a, std::int64_t b);

  /// Bernoulli(q) for a known q in [0,1]; consumes one unit draw.
  /// Throws InvalidArgument when q is outside [0,1] or NaN.
  bool bernoulli(double q);

  std::uint64_t draws() const noexcept { return draws_; }

  friend bool operator==(const UniformSource&, const UniformSource&) = default;

 private:
  std::uint64_t next_word() noexcept;
  double unit_uncounted() noexcept;

  std::array<std::uint64_t, 4> state_{};
  std::uint64_t draws_ = 0;
};

class CoinHarness;

/// A stream of iid Bernoulli(p) coins whose p is not readable through the
/// public interface. Factories get a CoinStream& and can only flip it; the
/// test harness reads p through CoinHarness, and every such read is counted.
class CoinStream {
 public:
  /// Throws InvalidArgument unless 0 <= p <= 1.
  CoinStream(double p, Seed seed);

  bool flip() noexcept {
    ++flips_;
    return source_.unit() < p_;
  }

  std::uint64_t flips() const noexcept { return flips_; }

  /// Number of times the hidden p was read through CoinHarness.
  std::uint64_t p_reads() const noexcept { return p_reads_; }

 private:
  friend class CoinHarness;

  double p_;
  UniformSource source_;
  std::uint64_t flips_ = 0;
  mutable std::uint64_t p_reads_ = 0;
};

/// Harness-side view of a coin. Only validation and oracle code uses this.
class CoinHarness {
 public:
  static double reveal_p(const CoinStream& coin) noexcept {
    ++coin.p_reads_;
    return coin.p_;
  }
};

}  // namespace perfsim
