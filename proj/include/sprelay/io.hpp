#pragma once

// Text formats: channel files, flat key=value experiment configs, and the
// per-cell results CSV.

#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sprelay/model.hpp"
#include "sprelay/simkit.hpp"

namespace sprelay {

// Malformed input; the message names the offending line when there is one.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// %.17g; reads back to the same double.
std::string format_double(double v);

ProtocolKind parse_protocol(const std::string& name);
// "novel", "benchmark", or "both" (novel then benchmark).
std::vector<ProtocolKind> parse_protocol_set(const std::string& name);

/// Channel file:
///
///     # comment
///     K 4
///     U 2
///     g_sr
///     <K values>
///     g_su
///     <U rows of K values>
///     g_ru
///     <U rows of K values>
///
/// Blank lines and lines starting with '#' are ignored.
ChannelRealization read_channel(std::istream& in);
ChannelRealization read_channel_file(const std::string& path);
void write_channel(std::ostream& out, const ChannelRealization& channel);

/// Flat `key = value` experiment config. Lists are comma separated. Keys:
/// geometry.{source_x, source_y, relay_x, relay_y, region_x, region_y,
/// region_radius, path_loss_exponent, num_taps, reference_gain},
/// experiment.{subcarriers, users, snr_db, realizations, protocols, seed},
/// solver.{epsilon_rel, max_bisection_iters, bracket_growth}. Keys under
/// `run.` are ignored so a manifest can be read back as a config. When
/// geometry.reference_gain is absent it is set to give the source to
/// region-centre link unit average gain.
ExperimentConfig read_config(std::istream& in);
ExperimentConfig read_config_file(const std::string& path);
// Every key, fully resolved.
void write_config(std::ostream& out, const ExperimentConfig& config);

inline constexpr const char* kCsvHeader =
    "K,snr_db,protocol,mean_rate_bpos,stderr,mean_ratio,stderr_ratio,"
    "realizations,nonconverged";

void write_csv_row(std::ostream& out, const CellResult& cell);
// Parses a CSV written by write_csv_row (header included). `rates` stay empty.
std::vector<CellResult> read_csv(std::istream& in);

}  // namespace sprelay
