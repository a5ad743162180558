// pwfkit: batch experiment harness for structured phaseless recovery.
//
//   pwfkit run|grid|width|verify --config <path> [--out-dir <dir>] [--seed <u64>]
//
// Exit codes: 0 success, 1 verification failed, 2 config error,
// 3 unsupported feature, 4 I/O error.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pwf/constraints.hpp"
#include "pwf/experiment.hpp"

namespace {

struct CliArgs {
  std::string config_path;
  std::string out_dir;
  bool out_dir_set = false;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

const char* mode_name(pwf::RunMode mode) {
  switch (mode) {
    case pwf::RunMode::run:
      return "run";
    case pwf::RunMode::grid:
      return "grid";
    case pwf::RunMode::width:
      return "width";
    case pwf::RunMode::verify:
      return "verify";
  }
  return "?";
}

int execute(const CliArgs& args, pwf::RunMode expected_mode) {
  pwf::ExperimentConfig cfg = pwf::parse_config_file(args.config_path);
  if (cfg.mode != expected_mode)
    throw pwf::config_error(std::string("config mode '") + mode_name(cfg.mode) +
                            "' does not match subcommand '" + mode_name(expected_mode) + "'");
  if (args.out_dir_set) cfg.out_dir = args.out_dir;
  if (args.seed_set) cfg.base_seed = args.seed;
  return pwf::run_command(cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pwfkit: projected Wirtinger flow experiments"};
  app.require_subcommand(1);

  CliArgs args;
  pwf::RunMode mode = pwf::RunMode::run;

  auto add_mode = [&](const char* name, const char* desc, pwf::RunMode m) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", args.config_path, "config file path")->required();
    sub->add_option("--out-dir", args.out_dir, "output directory (overrides config)")
        ->each([&](const std::string&) { args.out_dir_set = true; });
    sub->add_option("--seed", args.seed, "base seed (overrides config)")
        ->each([&](const std::string&) { args.seed_set = true; });
    sub->callback([&, m]() { mode = m; });
    return sub;
  };

  add_mode("run", "single recovery, trace + summary", pwf::RunMode::run);
  add_mode("grid", "phase-transition grid over (s, m)", pwf::RunMode::grid);
  add_mode("width", "Monte Carlo statistical dimension of a cone", pwf::RunMode::width);
  add_mode("verify", "empirical lemma checks", pwf::RunMode::verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    return execute(args, mode);
  } catch (const pwf::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const pwf::unsupported_projection& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return 3;
  } catch (const pwf::io_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
