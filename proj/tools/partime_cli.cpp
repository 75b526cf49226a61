#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "partime/harness.hpp"

namespace fs = std::filesystem;
using namespace partime;

namespace {

int run_cmd(const std::string& config, const std::string& out, const std::string& format, std::uint64_t* seed) {
  ExperimentConfig cfg = load_config(config);
  if (seed) cfg.seed = *seed;
  const ExperimentResult r = run_experiment(cfg);
  auto emit = [&](std::ostream& os) {
    if (format == "csv") write_csv(r, os);
    else write_json(r, os);
  };
  if (out.empty()) {
    emit(std::cout);
  } else {
    fs::create_directories(out);
    const fs::path path = fs::path(out) / (cfg.name + "." + format);
    std::ofstream os(path);
    emit(os);
    if (format == "csv") {
      std::ofstream bj(fs::path(out) / (cfg.name + ".bounds.json"));
      write_bounds_json(r.bounds, bj);
    }
    std::cerr << "wrote " << path.string() << '\n';
  }
  for (const auto& v : r.violations) std::cerr << "violation: " << v << '\n';
  return r.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convergence bounds and experiments for two-level parallel-in-time iterations"};
  app.require_subcommand(1);

  std::string config, out, format = "csv", filter;
  std::uint64_t seed = 0;
  bool inject = false;

  auto* run = app.add_subcommand("run", "run an experiment and emit per-iteration ratios with bounds");
  run->add_option("--config", config, "experiment configuration (JSON)")->required();
  run->add_option("--out", out, "output directory (default: stdout)");
  run->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  auto* seed_opt = run->add_option("--seed", seed, "override the configuration seed");

  auto* verify = app.add_subcommand("verify", "check every invariant on the built-in suite");
  verify->add_option("--filter", filter, "only run checks whose name contains this string");
  verify->add_flag("--inject-pinv-fault", inject, "corrupt the pseudoinverse to exercise failure reporting");

  auto* bounds = app.add_subcommand("bounds", "print the bound report for a configuration");
  bounds->add_option("--config", config, "experiment configuration (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return run_cmd(config, out, format, *seed_opt ? &seed : nullptr);
    if (*verify) {
      VerifyOptions opt;
      opt.filter = filter;
      opt.corrupt_pinv = inject;
      const VerifyReport r = verify_suite(opt);
      write_verify(r, std::cout);
      return r.ok() ? 0 : 1;
    }
    if (*bounds) {
      const ExperimentConfig cfg = load_config(config);
      write_bounds_json(compute_bounds(build_pair(cfg), cfg.grid, cfg.relaxations, cfg.cap), std::cout);
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
