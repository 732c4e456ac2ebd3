#include "sprelay/commands.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "sprelay/io.hpp"

namespace sprelay {

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

void print_allocation(std::ostream& out, ProtocolKind protocol, const SolveResult& r) {
  const Allocation& a = r.allocation;
  out << "protocol " << to_string(protocol) << '\n'
      << "sum_rate_bpos " << format_double(a.sum_rate) << '\n'
      << "total_power " << format_double(a.total_power) << '\n'
      << "mu " << format_double(r.mu) << '\n'
      << "pairs " << a.decisions.size() << '\n'
      << "k l mode user p_s1 p_s2 p_r\n";
  for (const auto& d : a.decisions) {
    out << d.first_slot_subcarrier + 1 << ' ' << d.second_slot_subcarrier + 1 << ' ';
    if (const auto* rel = std::get_if<RelayAided>(&d.mode)) {
      out << "relay " << rel->user + 1 << ' ' << format_double(rel->split.p_s1) << ' '
          << format_double(rel->split.p_s2) << ' ' << format_double(rel->split.p_r);
    } else {
      const auto& dm = std::get<Direct>(d.mode);
      out << "direct " << dm.first_user + 1 << '/' << dm.second_user + 1 << ' '
          << format_double(dm.first_power) << ' ' << format_double(dm.second_power) << " 0";
    }
    out << '\n';
  }
}

int cmd_solve(const SolveOptions& opts, std::ostream& out, std::ostream& err) {
  std::optional<ChannelRealization> channel;
  SolverSettings settings;
  try {
    channel.emplace(read_channel_file(opts.channel_path));
    settings = SolverSettings::for_budget(opts.p_tot, opts.epsilon_rel);
    settings.max_bisection_iters = opts.max_bisection_iters;
    settings.validate();
    if (opts.protocols.empty()) throw std::invalid_argument("empty protocol set");
  } catch (const std::exception& e) {
    err << "error: " << opts.channel_path << ": " << e.what() << '\n';
    return 1;
  }

  int code = 0;
  std::ostringstream report;
  for (std::size_t i = 0; i < opts.protocols.size(); ++i) {
    const ProtocolKind p = opts.protocols[i];
    if (i) report << '\n';
    try {
      print_allocation(report, p, solve_detailed(*channel, p, settings));
    } catch (const NonConvergenceError& e) {
      err << "warning: " << to_string(p) << ": " << e.what() << '\n';
      SolveResult partial;
      partial.mu = e.best().mu;
      partial.allocation = e.best().allocation;
      print_allocation(report, p, partial);
      code = 2;
    }
  }
  if (!opts.quiet) out << report.str();
  if (opts.out_path) {
    std::ofstream f(*opts.out_path, std::ios::binary);
    f << report.str();
    if (!f) {
      err << "error: cannot write '" << *opts.out_path << "'\n";
      return 1;
    }
  }
  return code;
}

ExperimentReport write_experiment(const ExperimentConfig& config,
                                  const std::string& out_dir, unsigned workers,
                                  std::ostream* progress) {
  config.validate();
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const fs::path csv_path = fs::path(out_dir) / kResultsFile;
  const fs::path manifest_path = fs::path(out_dir) / kManifestFile;

  {
    std::ofstream m(manifest_path, std::ios::binary);
    write_config(m, config);
    m << "run.version = " << kToolVersion << '\n'
      << "run.timestamp = " << utc_timestamp() << '\n'
      << "run.output.results = " << csv_path.string() << '\n';
    if (!m) throw std::runtime_error("cannot write '" + manifest_path.string() + "'");
  }

  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw std::runtime_error("cannot write '" + csv_path.string() + "'");
  csv << kCsvHeader << '\n' << std::flush;
  return run_experiment(config, workers, [&](const CellResult& c) {
    write_csv_row(csv, c);
    csv.flush();
    if (progress)
      *progress << "K=" << c.num_subcarriers << " snr_db=" << format_double(c.snr_db) << ' '
                << to_string(c.protocol) << " mean_rate=" << format_double(c.mean_rate)
                << '\n';
  });
}

int cmd_experiment(const ExperimentOptions& opts, std::ostream& out, std::ostream& err) {
  ExperimentConfig config;
  try {
    config = read_config_file(opts.config_path);
    if (opts.seed) config.seed = *opts.seed;
    if (opts.protocols) config.protocols = *opts.protocols;
    if (opts.epsilon_rel) config.epsilon_rel = *opts.epsilon_rel;
    config.validate();
  } catch (const std::exception& e) {
    err << "error: " << opts.config_path << ": " << e.what() << '\n';
    return 1;
  }
  try {
    const auto report = write_experiment(config, opts.out_dir, opts.workers,
                                         opts.quiet ? nullptr : &out);
    std::size_t nonconverged = 0;
    for (const auto& c : report.cells) nonconverged += c.nonconverged;
    if (nonconverged > 0)
      err << "warning: " << nonconverged << " solves did not converge\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace sprelay
