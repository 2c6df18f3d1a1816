// Batch front end over the C API.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "se23lqr/se23lqr.h"

namespace {

struct Options {
  std::string config_path;
  std::string out_dir = "out";
  std::string variant;
  std::string format = "csv";
  std::uint64_t seed = 0;
  bool has_seed = false;
};

int fail(const std::string& what) {
  std::cerr << "se23lqr: " << what << '\n';
  return 1;
}

int run(const std::string& experiment, const Options& opt) {
  std::string text;
  if (!opt.config_path.empty()) {
    std::ifstream is(opt.config_path);
    if (!is) return fail(opt.config_path + ": cannot open");
    std::ostringstream ss;
    ss << is.rdbuf();
    text = ss.str();
  }
  se23_config* cfg = nullptr;
  if (se23_config_parse(text.c_str(), &cfg) != SE23_OK) return fail(se23_last_error());
  auto cleanup = [&] { se23_config_free(cfg); };

  if (opt.has_seed && se23_config_set_seed(cfg, opt.seed) != SE23_OK) {
    cleanup();
    return fail(se23_last_error());
  }
  if (!opt.variant.empty() && se23_config_set_variant(cfg, opt.variant.c_str()) != SE23_OK) {
    cleanup();
    return fail(se23_last_error());
  }
  const se23_status st = se23_run_experiment(cfg, experiment.c_str(), opt.out_dir.c_str());
  cleanup();
  if (st != SE23_OK) return fail(se23_last_error());
  std::cout << experiment << ": results written to " << opt.out_dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quadrotor trajectory tracking with error-state LQR on SE2(3)"};
  app.set_version_flag("--version", std::string(se23_version()));
  app.require_subcommand(1);

  Options opt;
  std::uint64_t seed = 0;
  for (const auto& [name, help] :
       {std::pair{"simulate", "single closed-loop run"},
        std::pair{"sweep-heading", "RMSE against initial heading error, all four controllers"},
        std::pair{"uncertainty", "80% parameter estimates, with and without integral action"},
        std::pair{"monte-carlo", "randomised trials with estimation noise and actuator lag"},
        std::pair{"gains", "dump the offline gain schedule and reference track"}}) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config_path, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "seed (scenario seed and Monte-Carlo master seed)");
    sub->add_option("--out-dir", opt.out_dir, "output directory")->capture_default_str();
    sub->add_option("--variant", opt.variant, "se23-drag | se23-nodrag | conv-drag | conv-nodrag");
    sub->add_option("--format", opt.format, "output format")->check(CLI::IsMember({"csv"}))->capture_default_str();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  for (auto* sub : app.get_subcommands()) {
    opt.has_seed = sub->count("--seed") > 0;
    opt.seed = seed;
    return run(sub->get_name(), opt);
  }
  return 1;
}
