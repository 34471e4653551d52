#include "perfsim/rand.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "perfsim/errors.hpp"

namespace perfsim {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Seed derive_stream(Seed seed, std::uint64_t index) noexcept {
  // Two rounds so that nearby (seed, index) pairs land far apart.
  const std::uint64_t a = mix64(seed.value + kGolden * (index + 1));
  return Seed{mix64(a ^ (0xD1B54A32D192ED03ULL * (index + 0x632BE59BD9B4E019ULL)))};
}

UniformSource::UniformSource(Seed seed) noexcept {
  std::uint64_t s = seed.value;
  for (auto& word : state_) {
    s += kGolden;
    word = mix64(s);
  }
}

std::uint64_t UniformSource::next_word() noexcept {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double UniformSource::unit_uncounted() noexcept {
  return static_cast<double>(next_word() >> 11) * 0x1.0p-53;
}

double UniformSource::unit() noexcept {
  ++draws_;
  return unit_uncounted();
}

std::int64_t UniformSource::uniform_int(std::int64_t a, std::int64_t b) {
  if (a > b) {
    throw InvalidArgument("uniform_int: empty range {" + std::to_string(a) + ".." +
                          std::to_string(b) + "}");
  }
  ++draws_;
  const std::uint64_t span = static_cast<std::uint64_t>(b) - static_cast<std::uint64_t>(a) + 1;
  if (span == 0) {
    return static_cast<std::int64_t>(next_word());
  }
  // Accept only words below the largest multiple of span.
  const std::uint64_t reject_below = (0 - span) % span;
  std::uint64_t word = next_word();
  while (word < reject_below) {
    word = next_word();
  }
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + word % span);
}

bool UniformSource::bernoulli(double q) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw InvalidArgument("bernoulli: probability " + std::to_string(q) + " outside [0,1]");
  }
  return unit() < q;
}

CoinStream::CoinStream(double p, Seed seed) : p_(p), source_(seed) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidArgument("coin: probability " + std::to_string(p) + " outside [0,1]");
  }
}

}  // namespace perfsim
