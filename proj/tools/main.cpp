#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "commands.hpp"
#include "perfsim/errors.hpp"

using namespace perfsim::cli;

namespace {

struct Output {
  std::string format;
  std::string out;
};

void add_common(CLI::App* app, Common& common, Output& output, const std::string& default_format) {
  output.format = default_format;
  app->add_option("--samples", common.samples, "number of independent runs")->capture_default_str();
  app->add_option("--seed", common.seed, "master seed")->capture_default_str();
  app->add_option("--significance", common.significance, "chi-squared significance level")
      ->capture_default_str();
  app->add_option("--threads", common.threads, "worker threads, 0 = all cores (output is identical)")
      ->capture_default_str();
  app->add_option("--format", output.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  app->add_option("--out", output.out, "write the report here instead of stdout");
}

void add_output(CLI::App* app, Output& output, const std::string& default_format) {
  output.format = default_format;
  app->add_option("--format", output.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  app->add_option("--out", output.out, "write the report here instead of stdout");
}

int emit(const Json& report, const Output& output) {
  const std::string text = render(report, output.format == "csv" ? Format::csv : Format::json);
  if (output.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream file(output.out, std::ios::binary);
    if (!file) throw perfsim::InvalidArgument("cannot write " + output.out);
    file << text;
  }
  return report.value("pass", false) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perfect simulation samplers and their statistical checks"};
  app.require_subcommand(1);

  ArConfig ar;
  Output ar_out;
  auto* ar_cmd = app.add_subcommand("ar", "accept-reject samplers");
  add_common(ar_cmd, ar.common, ar_out, "json");
  ar_cmd->add_option("--variant", ar.variant)
      ->check(CLI::IsMember({"basic", "adaptive-param", "general", "adaptive-envelope"}))
      ->capture_default_str();
  ar_cmd->add_option("--alpha0", ar.alpha0, "initial parameter of adaptive-param")->capture_default_str();
  ar_cmd->add_option("--target", ar.target_file, "target density JSON");
  ar_cmd->add_option("--envelope", ar.envelope_file, "envelope density JSON");
  ar_cmd->add_option("--rule", ar.rule, "refinement rule of adaptive-envelope")
      ->check(CLI::IsMember({"identity", "halve"}))
      ->capture_default_str();

  CftpConfig cftp;
  Output cftp_out;
  auto* cftp_cmd = app.add_subcommand("cftp", "coupling from the past");
  add_common(cftp_cmd, cftp.common, cftp_out, "json");
  cftp_cmd->add_option("--chain", cftp.chain, "walk3, twostate, lazy3 or identity3")->capture_default_str();
  cftp_cmd->add_option("--chain-file", cftp.chain_file, "chain JSON {states?, kernel}");
  cftp_cmd->add_option("--schedule", cftp.schedule, "doubling or increment")->capture_default_str();
  cftp_cmd->add_option("--alpha0", cftp.alpha0, "first block length")->capture_default_str();
  cftp_cmd->add_option("--max-block", cftp.max_block, "longest block before giving up")->capture_default_str();

  BfConfig bf;
  Output bf_out;
  auto* bf_cmd = app.add_subcommand("bf", "Bernoulli factory for (Cp)^i");
  add_common(bf_cmd, bf.common, bf_out, "json");
  bf_cmd->add_option("--C", bf.c)->capture_default_str();
  bf_cmd->add_option("--i", bf.i)->capture_default_str();
  bf_cmd->add_option("--eps", bf.eps)->capture_default_str();
  bf_cmd->add_option("--p", bf.p, "coin probability, known only to the harness")->capture_default_str();

  RuinConfig ruin;
  Output ruin_out;
  auto* ruin_cmd = app.add_subcommand("ruin", "gambler's ruin absorption times");
  add_output(ruin_cmd, ruin_out, "json");
  ruin_cmd->add_option("--r", ruin.r, "up-step probability")->capture_default_str();
  ruin_cmd->add_option("--n", ruin.n, "upper barrier")->capture_default_str();
  ruin_cmd->add_option("--start", ruin.start)->capture_default_str();
  ruin_cmd->add_option("--mc-check", ruin.mc_check, "Monte Carlo walks, 0 = skip")->capture_default_str();
  ruin_cmd->add_option("--seed", ruin.seed)->capture_default_str();

  BoundsConfig bounds;
  Output bounds_out;
  auto* bounds_cmd = app.add_subcommand("bounds", "flip-count bounds, new and prior");
  add_output(bounds_cmd, bounds_out, "csv");
  bounds_cmd->add_option("--C", bounds.c)->expected(1, -1)->capture_default_str();
  bounds_cmd->add_option("--eps", bounds.eps)->expected(1, -1)->capture_default_str();

  VerifyLocalConfig verify;
  Output verify_out;
  auto* verify_cmd = app.add_subcommand("verify-local", "level-n truncation with an exact oracle");
  add_common(verify_cmd, verify.common, verify_out, "json");
  verify_cmd->add_option("--algorithm", verify.algorithm)
      ->check(CLI::IsMember({"ar2", "ar3", "ar4", "cftp-walk3"}))
      ->capture_default_str();
  verify_cmd->add_option("--n", verify.n, "truncation level")->capture_default_str();
  verify_cmd->add_option("--alpha0", verify.alpha0, "initial parameter for ar3")->capture_default_str();

  BenchConfig bench;
  Output bench_out;
  std::string grid_file;
  std::vector<double> bench_c, bench_eps, bench_p;
  auto* bench_cmd = app.add_subcommand("bench", "linear factory flips against the bounds");
  add_common(bench_cmd, bench.common, bench_out, "csv");
  bench_cmd->add_option("--grid", grid_file, "JSON array of {C, eps, p?}");
  bench_cmd->add_option("--C", bench_c)->expected(1, -1);
  bench_cmd->add_option("--eps", bench_eps)->expected(1, -1);
  bench_cmd->add_option("--p", bench_p, "default (1 - eps) / (2C)")->expected(1, -1);
  bench_cmd->add_flag("--timing", bench.timing, "add wall-clock columns (not reproducible)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*ar_cmd) return emit(cmd_ar(ar), ar_out);
    if (*cftp_cmd) return emit(cmd_cftp(cftp), cftp_out);
    if (*bf_cmd) return emit(cmd_bf(bf), bf_out);
    if (*ruin_cmd) return emit(cmd_ruin(ruin), ruin_out);
    if (*bounds_cmd) return emit(cmd_bounds(bounds), bounds_out);
    if (*verify_cmd) return emit(cmd_verify_local(verify), verify_out);
    if (*bench_cmd) {
      if (!grid_file.empty()) {
        bench.grid = load_bench_grid(grid_file);
      } else if (bench_c.empty() && bench_eps.empty() && bench_p.empty()) {
        bench.grid = default_bench_grid();
      } else {
        if (bench_c.empty()) bench_c = {1.0, 2.0, 4.0};
        if (bench_eps.empty()) bench_eps = {0.1, 0.3};
        for (double c : bench_c) {
          for (double eps : bench_eps) {
            if (bench_p.empty()) {
              bench.grid.push_back({c, eps, std::nullopt});
            } else {
              for (double p : bench_p) bench.grid.push_back({c, eps, p});
            }
          }
        }
      }
      return emit(cmd_bench(bench), bench_out);
    }
  } catch (const perfsim::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
