// sprelay: resource allocation for relay-aided downlink OFDMA.
//
//   sprelay solve --channel ch.txt --ptot 100 --protocol both
//   sprelay experiment --config sweep.cfg --out results/

#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "sprelay/commands.hpp"
#include "sprelay/io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Sum-rate resource allocation for DF-relay-aided downlink OFDMA"};
  app.set_version_flag("--version", sprelay::kToolVersion);
  app.require_subcommand(1);

  std::string protocol = "novel";
  std::optional<double> epsilon;
  bool quiet = false;

  sprelay::SolveOptions solve_opts;
  std::optional<double> snr_db;
  std::string out_file;
  auto* solve = app.add_subcommand("solve", "Solve one channel file");
  solve->add_option("--channel", solve_opts.channel_path, "Channel file")->required();
  auto* ptot_opt = solve->add_option("--ptot", solve_opts.p_tot, "Total power budget Ptot/sigma^2 (linear)");
  solve->add_option("--snr-db", snr_db, "Total power budget Ptot/sigma^2 in dB")->excludes(ptot_opt);
  solve->add_option("--protocol", protocol, "novel, benchmark or both")
      ->check(CLI::IsMember({"novel", "benchmark", "both"}));
  solve->add_option("--epsilon", epsilon, "Power tolerance as a fraction of the budget");
  solve->add_option("--max-iters", solve_opts.max_bisection_iters, "Bisection iteration cap");
  solve->add_option("--out", out_file, "Also write the report to this file");
  solve->add_flag("--quiet", quiet, "Do not print the report");

  sprelay::ExperimentOptions exp_opts;
  std::optional<std::uint64_t> seed;
  std::string exp_protocol;
  exp_opts.workers = std::max(1u, std::thread::hardware_concurrency());
  auto* experiment = app.add_subcommand("experiment", "Run a Monte Carlo sweep");
  experiment->add_option("--config", exp_opts.config_path, "Experiment config file")->required();
  experiment->add_option("--out", exp_opts.out_dir, "Output directory");
  experiment->add_option("--seed", seed, "Override experiment.seed");
  experiment->add_option("--protocol", exp_protocol, "Override protocols: novel, benchmark or both")
      ->check(CLI::IsMember({"novel", "benchmark", "both"}));
  experiment->add_option("--epsilon", epsilon, "Override solver.epsilon_rel");
  experiment->add_option("--workers", exp_opts.workers, "Worker threads")
      ->check(CLI::PositiveNumber);
  experiment->add_flag("--quiet", quiet, "No progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (solve->parsed()) {
    solve_opts.protocols = sprelay::parse_protocol_set(protocol);
    if (snr_db) solve_opts.p_tot = sprelay::db_to_linear(*snr_db);
    if (epsilon) solve_opts.epsilon_rel = *epsilon;
    if (!out_file.empty()) solve_opts.out_path = out_file;
    solve_opts.quiet = quiet;
    return sprelay::cmd_solve(solve_opts, std::cout, std::cerr);
  }
  exp_opts.seed = seed;
  if (!exp_protocol.empty()) exp_opts.protocols = sprelay::parse_protocol_set(exp_protocol);
  exp_opts.epsilon_rel = epsilon;
  exp_opts.quiet = quiet;
  return sprelay::cmd_experiment(exp_opts, std::cout, std::cerr);
}
