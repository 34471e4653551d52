#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "doctest.h"
#include "perfsim/errors.hpp"
#include "perfsim/rand.hpp"
#include "perfsim/stats.hpp"
#include "test_support.hpp"

using namespace perfsim;
using perfsim::testing::kSeeds;

namespace {

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const auto n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

// Access discipline: a factory holding a CoinStream cannot name p.
template <class T>
concept ReadsHiddenMember = requires(const T& c) { c.p_; };
template <class T>
concept ReadsAccessor = requires(const T& c) { c.p(); };
static_assert(!ReadsHiddenMember<CoinStream>);
static_assert(!ReadsAccessor<CoinStream>);

TEST_CASE("unit draws lie in [0,1) and replay") {
  UniformSource a(Seed{42});
  UniformSource b(Seed{42});
  for (int i = 0; i < 10000; ++i) {
    const double u = a.unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(u == b.unit());
  }
  CHECK(a.draws() == 10000);
}

TEST_CASE("unit mean over 10^6 draws is within 0.002 of 1/2") {
  UniformSource src(Seed{7});
  double sum = 0;
  for (int i = 0; i < 1'000'000; ++i) sum += src.unit();
  CHECK(std::abs(sum / 1e6 - 0.5) < 0.002);
}

TEST_CASE("unit draws pass a 10-bin chi-squared under three seeds") {
  for (Seed seed : kSeeds) {
    UniformSource src(seed);
    std::vector<std::uint64_t> bins(10, 0);
    for (int i = 0; i < 1'000'000; ++i) ++bins[static_cast<std::size_t>(src.unit() * 10)];
    CHECK(stats::chi_squared_gof(bins, std::vector<double>(10, 0.1)).pass);
  }
}

TEST_CASE("uniform_int") {
  SUBCASE("singleton range") {
    UniformSource src(Seed{1});
    for (int i = 0; i < 100; ++i) CHECK(src.uniform_int(3, 3) == 3);
  }
  SUBCASE("{1..10} passes chi-squared at 1e-3 under three seeds") {
    for (Seed seed : kSeeds) {
      UniformSource src(seed);
      std::vector<std::uint64_t> counts(10, 0);
      for (int i = 0; i < 1'000'000; ++i) {
        const auto x = src.uniform_int(1, 10);
        REQUIRE(x >= 1);
        REQUIRE(x <= 10);
        ++counts[static_cast<std::size_t>(x - 1)];
      }
      CHECK(stats::chi_squared_gof(counts, std::vector<double>(10, 0.1)).pass);
    }
  }
  SUBCASE("replay under the same seed") {
    UniformSource a(Seed{5});
    UniformSource b(Seed{5});
    for (int i = 0; i < 1000; ++i) CHECK(a.uniform_int(1, 5) == b.uniform_int(1, 5));
  }
  SUBCASE("empty range is rejected") {
    UniformSource src(Seed{1});
    CHECK_THROWS_AS(src.uniform_int(4, 3), InvalidArgument);
    CHECK(src.draws() == 0);
  }
  SUBCASE("extreme ranges") {
    UniformSource src(Seed{1});
    constexpr auto lo = std::numeric_limits<std::int64_t>::min();
    constexpr auto hi = std::numeric_limits<std::int64_t>::max();
    (void)src.uniform_int(lo, hi);
    CHECK(src.uniform_int(hi, hi) == hi);
    const auto x = src.uniform_int(lo, lo + 1);
    CHECK((x == lo || x == lo + 1));
  }
  SUBCASE("large spans carry no modulo bias") {
    // span = 3 * 2^61: plain modulo would give P(x < 2^62) = 1/2 instead of 2/3.
    UniformSource src(Seed{9});
    const std::int64_t b = 3 * (std::int64_t{1} << 61) - 1;
    std::uint64_t low = 0;
    for (int i = 0; i < 100000; ++i) {
      if (src.uniform_int(0, b) < (std::int64_t{1} << 62)) ++low;
    }
    CHECK(perfsim::testing::within_4_sigma(low, 100000, 2.0 / 3.0));
  }
}

TEST_CASE("bernoulli with known q") {
  UniformSource src(Seed{3});
  for (int i = 0; i < 1000; ++i) {
    CHECK_FALSE(src.bernoulli(0.0));
    CHECK(src.bernoulli(1.0));
  }
  CHECK(src.draws() == 2000);

  std::uint64_t ones = 0;
  for (int i = 0; i < 1'000'000; ++i) ones += src.bernoulli(2.0 / 3.0);
  CHECK(std::abs(static_cast<double>(ones) / 1e6 - 2.0 / 3.0) < 0.0019);

  CHECK_THROWS_AS(src.bernoulli(-0.01), InvalidArgument);
  CHECK_THROWS_AS(src.bernoulli(1.01), InvalidArgument);
  CHECK_THROWS_AS(src.bernoulli(std::nan("")), InvalidArgument);
}

TEST_CASE("coin flips") {
  SUBCASE("p = 1 always lands 1") {
    CoinStream coin(1.0, Seed{1});
    for (int i = 0; i < 1000; ++i) CHECK(coin.flip());
    CHECK(coin.flips() == 1000);
  }
  SUBCASE("p = 0.3 mean and adjacent independence") {
    CoinStream coin(0.3, Seed{8});
    std::vector<double> first, second;
    std::uint64_t ones = 0;
    constexpr int n = 1'000'000;
    std::vector<double> seq(n);
    for (int i = 0; i < n; ++i) {
      seq[i] = coin.flip() ? 1.0 : 0.0;
      ones += seq[i] > 0;
    }
    CHECK(coin.flips() == n);
    CHECK(std::abs(static_cast<double>(ones) / n - 0.3) < 0.0019);
    first.assign(seq.begin(), seq.end() - 1);
    second.assign(seq.begin() + 1, seq.end());
    CHECK(std::abs(correlation(first, second)) < 4.0 / std::sqrt(1e6));
  }
  SUBCASE("p is only visible through the harness, and each read is counted") {
    CoinStream coin(0.25, Seed{1});
    for (int i = 0; i < 10; ++i) coin.flip();
    CHECK(coin.p_reads() == 0);
    CHECK(CoinHarness::reveal_p(coin) == 0.25);
    CHECK(coin.p_reads() == 1);
  }
  SUBCASE("invalid p") {
    CHECK_THROWS_AS(CoinStream(1.5, Seed{1}), InvalidArgument);
    CHECK_THROWS_AS(CoinStream(-0.5, Seed{1}), InvalidArgument);
  }
}

TEST_CASE("derive_stream") {
  const Seed parent{123456789};
  CHECK(derive_stream(parent, 0) == derive_stream(parent, 0));
  CHECK_FALSE(derive_stream(parent, 0) == derive_stream(parent, 1));
  CHECK_FALSE(UniformSource(derive_stream(parent, 0)) == UniformSource(derive_stream(parent, 1)));

  // Adjacent child streams are uncorrelated.
  for (std::uint64_t k : {0, 1, 500}) {
    UniformSource a(derive_stream(parent, k));
    UniformSource b(derive_stream(parent, k + 1));
    constexpr int n = 100000;
    std::vector<double> xa(n), xb(n);
    for (int i = 0; i < n; ++i) {
      xa[i] = a.unit();
      xb[i] = b.unit();
    }
    CHECK(std::abs(correlation(xa, xb)) < 4.0 / std::sqrt(1e5));
  }
  // Consecutive parent seeds do not yield overlapping children.
  CHECK_FALSE(derive_stream(Seed{1}, 0) == derive_stream(Seed{0}, 1));
}
