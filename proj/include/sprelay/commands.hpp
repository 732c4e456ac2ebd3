#pragma once

// Command implementations behind the `sprelay` executable. They return the
// process exit code: 0 success, 1 malformed input or configuration, 2 solver
// non-convergence (the report is still written).

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sprelay/dualsolve.hpp"
#include "sprelay/simkit.hpp"

namespace sprelay {

inline constexpr const char* kToolVersion = "1.0.0";

struct SolveOptions {
  std::string channel_path;
  std::vector<ProtocolKind> protocols{ProtocolKind::Novel};
  double p_tot = 1.0;
  double epsilon_rel = 1e-6;
  int max_bisection_iters = 200;
  std::optional<std::string> out_path;
  bool quiet = false;
};

// Human-readable allocation report, 1-based indices.
void print_allocation(std::ostream& out, ProtocolKind protocol, const SolveResult& r);

int cmd_solve(const SolveOptions& opts, std::ostream& out, std::ostream& err);

struct ExperimentOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<ProtocolKind>> protocols;
  std::optional<double> epsilon_rel;
  unsigned workers = 1;
  bool quiet = false;
};

inline constexpr const char* kResultsFile = "results.csv";
inline constexpr const char* kManifestFile = "manifest.txt";

/// Runs `config` and writes <out_dir>/results.csv (rows flushed as cells
/// finish) and <out_dir>/manifest.txt (resolved config plus run metadata).
/// Throws on I/O or configuration errors.
ExperimentReport write_experiment(const ExperimentConfig& config,
                                  const std::string& out_dir, unsigned workers,
                                  std::ostream* progress);

int cmd_experiment(const ExperimentOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace sprelay
