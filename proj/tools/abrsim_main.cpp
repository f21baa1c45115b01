#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "abr/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"abrsim: ABR rate-control simulator and conformance checker"};
  app.require_subcommand(1);

  abr::cli::RunOptions run_opts;
  double stop_ms = 0;
  std::uint64_t seed = 0;
  CLI::App* run = app.add_subcommand("run", "Simulate a scenario file");
  run->add_option("scenario", run_opts.scenario_path, "scenario JSON file")
      ->required();
  run->add_option("--trace", run_opts.trace_path, "trace output path (JSONL)");
  run->add_option("--metrics", run_opts.metrics_path, "metrics output path");
  CLI::Option* stop_opt =
      run->add_option("--stop-time", stop_ms, "override run duration (ms)");
  CLI::Option* seed_opt =
      run->add_option("--seed", seed, "override the scenario RNG seed");

  std::string trace_path, params_path, role;
  CLI::App* check =
      app.add_subcommand("check", "Audit a trace against the behavior rules");
  check->add_option("trace", trace_path, "trace file (JSONL)")->required();
  check->add_option("--params", params_path, "negotiated parameter JSON file")
      ->required();
  check->add_option("--role", role, "source or destination")->required();

  std::string hex;
  CLI::App* decode =
      app.add_subcommand("decode", "Decode and validate one cell given as hex");
  decode->add_option("hex", hex, "106 hex characters")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return abr::cli::kInputError;
  }

  if (run->parsed()) {
    if (*stop_opt) run_opts.stop_ms = stop_ms;
    if (*seed_opt) run_opts.seed = seed;
    return abr::cli::cmd_run(run_opts, std::cout, std::cerr);
  }
  if (check->parsed())
    return abr::cli::cmd_check(trace_path, params_path, role, std::cout,
                               std::cerr);
  if (decode->parsed()) return abr::cli::cmd_decode(hex, std::cout, std::cerr);
  return abr::cli::kInputError;
}
