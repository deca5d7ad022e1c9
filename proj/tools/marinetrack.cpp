// marinetrack: scenario runner and experiment harness.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "marinetrack/experiments.hpp"

namespace mt = marinetrack;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kRuntime = 2;

struct CommonOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool force{false};
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "scenario config (JSON)")->required();
  cmd->add_option("--out", o.out, "output directory")->required();
  cmd->add_option("--seed", o.seed, "override scenario.seed");
  cmd->add_flag("--force", o.force, "overwrite existing outputs");
}

mt::RunConfig load(const CommonOptions& o) {
  mt::RunConfig rc = mt::load_config(o.config);
  if (o.seed) rc.scenario.seed = *o.seed;
  return rc;
}

void print_summary(const mt::RunResult& rr) {
  std::printf("mean_error_m=%.6f std_error_m=%.6f switches_per_drone_per_500m=%.6f frames=%ld\n",
              rr.evaluation.overall.mean_error, rr.evaluation.overall.std_error,
              rr.evaluation.switches.switches_per_drone_per_500m, rr.scenario.n_ticks());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-drone marine robot localization: simulate, track, fuse and evaluate"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  auto* run = app.add_subcommand("run", "run every stage on one scenario");
  add_common(run, run_opts);

  CommonOptions cmp_opts;
  auto* cmp = app.add_subcommand("compare-matchers", "IOU-only versus hybrid association");
  add_common(cmp, cmp_opts);

  CommonOptions sweep_opts;
  int n_seeds = 10;
  auto* sweep = app.add_subcommand("sweep-drones", "seed-averaged error for 3, 2 and 1 drones");
  add_common(sweep, sweep_opts);
  sweep->add_option("--seeds", n_seeds, "number of seeds")->check(CLI::PositiveNumber);

  std::string est_path;
  std::string truth_path;
  std::string eval_out;
  double frame_rate = 10.0;
  auto* eval = app.add_subcommand("eval", "ICP alignment and error report for two trajectory CSVs");
  eval->add_option("--estimated", est_path, "fused.csv or truth.csv style file")->required();
  eval->add_option("--truth", truth_path, "truth.csv style file")->required();
  eval->add_option("--out", eval_out, "write the report JSON here instead of stdout");
  eval->add_option("--frame-rate", frame_rate, "ticks per second when the file has no timestamps")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) {
      const mt::RunConfig rc = load(run_opts);
      print_summary(mt::run_scenario(rc, run_opts.out, run_opts.force));
    } else if (*cmp) {
      const mt::RunConfig rc = load(cmp_opts);
      std::cout << mt::matcher_table(mt::compare_matchers(rc, cmp_opts.out, cmp_opts.force));
    } else if (*sweep) {
      const mt::RunConfig rc = load(sweep_opts);
      std::cout << mt::sweep_table(mt::sweep_drones(rc, n_seeds, sweep_opts.out, sweep_opts.force));
    } else if (*eval) {
      const mt::ErrorReport r = mt::evaluate_files(est_path, truth_path, mt::IcpParams{}, frame_rate);
      const std::string text = mt::error_json(r).dump(2) + "\n";
      if (eval_out.empty()) std::cout << text;
      else mt::detail::write_text(eval_out, text);
    }
  } catch (const mt::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
