#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "fbq/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Fractional-dissipation Boussinesq solver and attractor diagnostics"};
  app.require_subcommand(1, 1);
  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  int threads = 0, digits = 0;
  bool allow_exponents = false;
  app.add_option("--config", config_path, "config file (sectioned key = value)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--digits", digits, "digits printed by gauss")->check(CLI::Range(1, 15));
  app.add_flag("--allow-out-of-range-exponents", allow_exponents, "accept alpha, beta outside (1/2, 1)");
  for (const auto& name : fbq::known_commands()) app.add_subcommand(name)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fbq::kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  fbq::RunConfig config;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw fbq::ConfigError("cannot read config file '" + config_path + "'");
      std::ostringstream text;
      text << in.rdbuf();
      config = fbq::parse_config(text.str());
    } else if (command != "gauss") {
      throw fbq::ConfigError("--config is required for '" + command + "'");
    }
    config.command = command;
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (app.count("--seed")) config.seed = seed;
    if (app.count("--threads")) config.threads = threads;
    if (app.count("--digits")) config.digits = digits;
    if (allow_exponents) config.params.allow_out_of_range_exponents = true;
    config.finalize();
  } catch (const fbq::ConfigError& e) {
    std::cerr << fbq::error_record(fbq::kExitConfig, "config", e.what()) << "\n";
    return fbq::kExitConfig;
  }
  try {
    return fbq::run(config, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << fbq::error_record(fbq::kExitFailure, "io", e.what()) << "\n";
    return fbq::kExitFailure;
  }
}
