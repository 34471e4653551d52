#pragma once

// Subcommands of the perfsim tool as plain functions, so tests can run them
// in-process. Each returns a report document whose "pass" field decides the
// exit code.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "perfsim/rand.hpp"

namespace perfsim::cli {

using Json = nlohmann::ordered_json;

enum class Format { json, csv };

struct Common {
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 1;
  double significance = 1e-3;
  unsigned threads = 0;  // 0 = hardware concurrency; never changes the payload
};

struct ArConfig {
  Common common;
  std::string variant = "basic";  // basic | adaptive-param | general | adaptive-envelope
  std::int64_t alpha0 = 100;
  std::string target_file;    // empty: built-in h = (1,2,3)
  std::string envelope_file;  // empty: built-in g = (2,2,4)
  std::string rule = "halve";  // identity | halve
};

struct CftpConfig {
  Common common;
  std::string chain = "walk3";  // walk3 | twostate | lazy3 | identity3
  std::string chain_file;       // overrides chain
  std::string schedule = "doubling";  // doubling | increment
  std::size_t alpha0 = 1;
  std::size_t max_block = std::size_t{1} << 20;
};

struct BfConfig {
  Common common;
  double c = 2.0;
  std::int64_t i = 1;
  double eps = 0.3;
  double p = 0.3;
};

struct RuinConfig {
  double r = 0.75;
  std::int64_t n = 10;
  std::int64_t start = 1;
  std::uint64_t mc_check = 0;  // walks; 0 skips the Monte Carlo check
  std::uint64_t seed = 1;
  double z = 4.0;
};

struct BoundsConfig {
  std::vector<double> c = {1.0, 2.0, 4.0};
  std::vector<double> eps = {0.3, 0.1, 0.05, 0.02, 0.01, 0.001};
};

struct VerifyLocalConfig {
  Common common;
  std::string algorithm = "ar2";  // ar2 | ar3 | ar4 | cftp-walk3
  std::size_t n = 0;
  std::int64_t alpha0 = 100;
};

struct BenchPoint {
  double c;
  double eps;
  std::optional<double> p;  // default (1 - eps) / (2C)
};

struct BenchConfig {
  Common common;
  std::vector<BenchPoint> grid;
  bool timing = false;  // adds wall-clock columns; the payload is then not reproducible
};

/// Default bench grid: C in {1,2,4} x eps in {0.1, 0.3}.
std::vector<BenchPoint> default_bench_grid();

/// [{"C": .., "eps": .., "p": ..?}, ...]
std::vector<BenchPoint> load_bench_grid(const std::string& path);

Json cmd_ar(const ArConfig& config);
Json cmd_cftp(const CftpConfig& config);
Json cmd_bf(const BfConfig& config);
Json cmd_ruin(const RuinConfig& config);
Json cmd_bounds(const BoundsConfig& config);
Json cmd_verify_local(const VerifyLocalConfig& config);
Json cmd_bench(const BenchConfig& config);

/// JSON text, or CSV: documents with a "rows" array become a table, anything
/// else becomes key,value lines over the flattened scalars.
std::string render(const Json& report, Format format);

}  // namespace perfsim::cli
