#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "perfsim/density.hpp"
#include "perfsim/errors.hpp"
#include "perfsim/stats.hpp"
#include "test_support.hpp"

using namespace perfsim;
using perfsim::testing::kSeeds;

namespace {

std::vector<std::uint64_t> draw_counts(const FiniteDensity& d, Seed seed, int n) {
  UniformSource src(seed);
  std::vector<std::uint64_t> counts(d.size(), 0);
  for (int i = 0; i < n; ++i) ++counts[d.sample(src)];
  return counts;
}

}  // namespace

TEST_CASE("normalize") {
  auto p = FiniteDensity({1, 1, 1, 1, 1}).normalize();
  for (double v : p) CHECK(v == doctest::Approx(0.2));

  p = FiniteDensity({1, 2, 3}).normalize();
  CHECK(p[0] == doctest::Approx(1.0 / 6.0));
  CHECK(p[1] == doctest::Approx(2.0 / 6.0));
  CHECK(p[2] == doctest::Approx(3.0 / 6.0));

  p = FiniteDensity({0, 5}).normalize();
  CHECK(p[0] == 0.0);
  CHECK(p[1] == 1.0);

  UniformSource src(Seed{4});
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> w(1 + trial % 17);
    for (double& x : w) x = src.unit() * 1e3;
    w[0] += 1e-3;
    const auto q = FiniteDensity(w).normalize();
    CHECK(std::abs(std::accumulate(q.begin(), q.end(), 0.0) - 1.0) <= 1e-12);
  }
}

TEST_CASE("construction rejects bad weights") {
  CHECK_THROWS_AS(FiniteDensity(std::vector<double>{0, 0}), DegenerateDensity);
  CHECK_THROWS_AS(FiniteDensity(std::vector<double>{}), InvalidArgument);
  CHECK_THROWS_AS(FiniteDensity(std::vector<double>{1, -1}), InvalidArgument);
  CHECK_THROWS_AS(FiniteDensity(std::vector<double>{1, std::nan("")}), InvalidArgument);
  CHECK_THROWS_AS(FiniteDensity({"a"}, {1, 2}), InvalidArgument);
}

TEST_CASE("sample_exact") {
  SUBCASE("point mass") {
    const FiniteDensity d({0, 0, 1});
    UniformSource src(Seed{1});
    for (int i = 0; i < 1000; ++i) CHECK(d.sample(src) == 2);
    CHECK(src.draws() == 1000);
  }
  SUBCASE("uniform weights pass chi-squared") {
    const FiniteDensity d({1, 1, 1, 1, 1, 1, 1});
    for (Seed seed : kSeeds) {
      CHECK(stats::chi_squared_gof(draw_counts(d, seed, 1'000'000), d.normalize()).pass);
    }
  }
  SUBCASE("weights (1,3): first point at 1/4") {
    const FiniteDensity d({1, 3});
    const auto counts = draw_counts(d, Seed{10}, 1'000'000);
    CHECK(perfsim::testing::within_4_sigma(counts[0], 1'000'000, 0.25));
  }
  SUBCASE("zero-weight points are never drawn") {
    const FiniteDensity d({0, 2, 0, 0, 1, 0});
    const auto counts = draw_counts(d, Seed{12}, 200000);
    CHECK(counts[0] == 0);
    CHECK(counts[2] == 0);
    CHECK(counts[3] == 0);
    CHECK(counts[5] == 0);
    CHECK(stats::chi_squared_gof(counts, d.normalize()).pass);
  }
}

TEST_CASE("acceptance_mass") {
  const FiniteDensity h({1, 2, 3});
  CHECK(EnvelopePair(h, h).acceptance_mass() == 1.0);
  CHECK(EnvelopePair(h, FiniteDensity({2, 2, 4})).acceptance_mass() == doctest::Approx(0.75));

  std::vector<double> target(10, 0.0);
  std::fill(target.begin(), target.begin() + 5, 1.0);
  const EnvelopePair padded(FiniteDensity(target), FiniteDensity(std::vector<double>(10, 1.0)));
  CHECK(padded.acceptance_mass() == doctest::Approx(0.5));
}

TEST_CASE("envelope dominance is checked exactly") {
  const FiniteDensity h({1, 2, 3});
  CHECK_THROWS_AS(EnvelopePair(h, FiniteDensity({1, 2, 2.9999999999999996})), EnvelopeViolation);
  CHECK_THROWS_AS(EnvelopePair(h, FiniteDensity({0.5, 100, 100})), EnvelopeViolation);
  CHECK_THROWS_AS(EnvelopePair(h, FiniteDensity({2, 2})), EnvelopeViolation);
  CHECK_THROWS_AS(EnvelopePair(h, FiniteDensity({"x", "y", "z"}, {5, 5, 5})), EnvelopeViolation);
  CHECK_NOTHROW(EnvelopePair(h, FiniteDensity({1, 2, 3})));

  // Randomized adversarial pairs: lower a single envelope point below h.
  UniformSource src(Seed{6});
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> hv(5), gv(5);
    for (std::size_t i = 0; i < 5; ++i) {
      hv[i] = 0.1 + src.unit();
      gv[i] = hv[i] + src.unit();
    }
    const auto victim = static_cast<std::size_t>(src.uniform_int(0, 4));
    gv[victim] = hv[victim] * (1.0 - 1e-12);
    CHECK_THROWS_AS(EnvelopePair(FiniteDensity(hv), FiniteDensity(gv)), EnvelopeViolation);
  }
}

TEST_CASE("density JSON") {
  const auto d = density_from_json(nlohmann::json::parse(
      R"({"domain": ["a", "b", 3], "weights": [1, 2.5, 0]})"));
  CHECK(d.size() == 3);
  CHECK(d.labels()[0] == "a");
  CHECK(d.labels()[2] == "3");
  CHECK(d.weight(1) == 2.5);
  CHECK(density_from_json(density_to_json(d)).weights() == d.weights());

  CHECK_THROWS_AS(density_from_json(nlohmann::json::parse(R"({"weights": [1]})")), InvalidArgument);
  CHECK_THROWS_AS(density_from_json(nlohmann::json::parse(R"({"domain": [1], "weights": ["x"]})")),
                  InvalidArgument);

  const auto path = std::filesystem::temp_directory_path() / "perfsim_density_test.json";
  {
    std::ofstream out(path);
    out << R"({"domain": [1, 2], "weights": [0.25, 0.75]})";
  }
  CHECK(load_density(path).normalize()[1] == doctest::Approx(0.75));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_density(path), InvalidArgument);
}
