// Command-line front end. Talks to the library through the C API only.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "convpot/capi.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Flags {
  std::string config;
  std::string out;
  int n_max = 0;
  int jobs = 0;
  bool no_cache = false;
};

int run(const std::string& command, const Flags& f) {
  std::string text = "{}";
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) {
      std::cerr << "error [config]: cannot read " << f.config << "\n";
      return kExitConfig;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  } else if (command != "example1") {
    std::cerr << "error [config]: '" << command << "' needs --config\n";
    return kExitConfig;
  }

  cp_run_options opts{};
  opts.out_dir = f.out.empty() ? nullptr : f.out.c_str();
  opts.n_max = f.n_max;
  opts.jobs = f.jobs;
  opts.no_cache = f.no_cache ? 1 : 0;

  char* summary = nullptr;
  char* stage = nullptr;
  const int rc = cp_run(command.c_str(), text.c_str(), &opts, &summary, &stage);
  if (rc == CP_OK) {
    std::cout << summary << "\n";
    cp_string_free(summary);
    return kExitOk;
  }
  const std::string where = stage ? stage : "run";
  cp_string_free(stage);
  std::cerr << "error [" << where << "]: " << cp_last_error() << "\n";
  const bool config_side = rc == CP_CONFIG_ERROR || where == "config" || where == "output";
  return config_side ? kExitConfig : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bergman polynomials, zero distributions and discrepancy on convex domains"};
  app.set_version_flag("--version", std::string(cp_version()));
  app.require_subcommand(1);

  Flags flags;
  const std::pair<const char*, const char*> commands[] = {
      {"validate", "check a config and its domains"},
      {"map", "build exterior and interior conformal maps"},
      {"orthopoly", "orthonormal polynomials, lambda_n and sup norms"},
      {"zeros", "zeros of Q_n as CSV rows (n, re, im, flag)"},
      {"sweep", "discrepancy and potential gap per degree"},
      {"theorem2", "D_n against sqrt(eps_n) across domains"},
      {"example1", "sharpness construction on the disk with a segment"},
      {"faber", "Faber polynomial norms and derivative growth"},
      {"chebyshev", "Chebyshev polynomials by Lawson iteration"},
      {"fit", "fitted constants from a degree sweep"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "JSON config file");
    sub->add_option("--out", flags.out, "output directory (overrides the config)");
    sub->add_option("--n-max", flags.n_max, "largest degree (overrides the config)")->check(CLI::PositiveNumber);
    sub->add_option("--jobs", flags.jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--no-cache", flags.no_cache, "ignore and do not write the map cache");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }
  for (const auto* sub : app.get_subcommands()) return run(sub->get_name(), flags);
  return kExitConfig;
}
