// Command-line front end for scenario files and presets.

#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "fracwell/errors.hpp"
#include "fracwell/scenario.hpp"

namespace {

struct Options {
  std::string config;
  std::string preset;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

fracwell::ScenarioConfig resolve(const Options& o) {
  if (o.config.empty() == o.preset.empty())
    throw fracwell::ConfigError("give exactly one of --config or --preset");
  fracwell::ScenarioConfig cfg =
      o.config.empty() ? fracwell::preset(o.preset) : fracwell::load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Potential-well analysis and time integration for fractional Musielak "
               "g-Laplacian heat equations on an interval"};
  app.require_subcommand(1);
  Options opt;

  auto scenario_flags = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "scenario file (JSON)");
    sub->add_option("--preset", opt.preset, "built-in scenario: rrem1, S1, S2, S3, S4");
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--seed", opt.seed, "override the config seed");
  };
  auto* check = app.add_subcommand("check-family", "structural conditions of kernel and source");
  auto* classify = app.add_subcommand("classify", "locate the initial data in the well picture");
  auto* depth = app.add_subcommand("depth-curve", "sampled well depth as a function of delta");
  auto* run = app.add_subcommand("run", "integrate the flow from the configured initial data");
  auto* sweep = app.add_subcommand("sweep", "run a parameter grid");
  auto* report = app.add_subcommand("report", "collect summaries below --out");
  for (auto* s : {check, classify, depth, run, sweep}) scenario_flags(s);
  sweep->add_option("--threads", opt.threads, "worker threads")->check(CLI::Range(1, 256));
  report->add_option("--out", opt.out, "directory to scan");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  using namespace fracwell;
  auto& log = std::cerr;
  return guarded(
      [&]() -> int {
        if (report->parsed()) return cmd_report(opt.out, log);
        const ScenarioConfig cfg = resolve(opt);
        if (check->parsed()) return cmd_check_family(cfg, opt.out, log);
        if (classify->parsed()) return cmd_classify(cfg, opt.out, log);
        if (depth->parsed()) return cmd_depth_curve(cfg, opt.out, log);
        if (run->parsed()) return cmd_run(cfg, opt.out, log);
        return cmd_sweep(cfg, opt.out, log, opt.threads);
      },
      log);
}
