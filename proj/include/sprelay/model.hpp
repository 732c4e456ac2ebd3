#pragma once

// Domain types for two-slot DF-relay-aided downlink OFDMA resource allocation.
//
// All gains are noise-normalized power gains (|h|^2 / sigma^2), so powers and
// gains multiply directly into SNRs. Subcarrier and user indices are 0-based.

#include <cstddef>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace sprelay {

enum class ProtocolKind {
  Novel,      // source and relay beamform on the second-slot subcarrier
  Benchmark,  // source stays silent on the second-slot subcarrier of a pair
};

std::string_view to_string(ProtocolKind p);

// Rate in bits per OFDM symbol: 0.5 * log2(1 + snr).
double rate_of_snr(double snr);

/// Normalized channel gains of one realization.
///
/// `g_su` and `g_ru` are stored row-major with one row of K entries per user.
class ChannelRealization {
 public:
  ChannelRealization(std::size_t num_subcarriers, std::size_t num_users,
                     std::vector<double> g_sr, std::vector<double> g_su,
                     std::vector<double> g_ru);

  std::size_t num_subcarriers() const { return k_; }
  std::size_t num_users() const { return u_; }

  double sr(std::size_t k) const { return g_sr_[k]; }
  double su(std::size_t u, std::size_t k) const { return g_su_[u * k_ + k]; }
  double ru(std::size_t u, std::size_t k) const { return g_ru_[u * k_ + k]; }

  std::span<const double> g_sr() const { return g_sr_; }
  std::span<const double> g_su() const { return g_su_; }
  std::span<const double> g_ru() const { return g_ru_; }

  bool operator==(const ChannelRealization&) const = default;

 private:
  std::size_t k_;
  std::size_t u_;
  std::vector<double> g_sr_;
  std::vector<double> g_su_;
  std::vector<double> g_ru_;
};

struct PowerSplit {
  double p_s1 = 0.0;  // source, first-slot subcarrier k
  double p_s2 = 0.0;  // source, second-slot subcarrier l
  double p_r = 0.0;   // relay, second-slot subcarrier l

  double total() const { return p_s1 + p_s2 + p_r; }
  PowerSplit scaled(double factor) const {
    return {p_s1 * factor, p_s2 * factor, p_r * factor};
  }
};

struct RelayAided {
  std::size_t user = 0;
  PowerSplit split;
};

struct Direct {
  std::size_t first_user = 0;   // served on subcarrier k in slot 1
  double first_power = 0.0;
  std::size_t second_user = 0;  // served on subcarrier l in slot 2
  double second_power = 0.0;
};

using PairMode = std::variant<RelayAided, Direct>;

struct PairDecision {
  std::size_t first_slot_subcarrier = 0;
  std::size_t second_slot_subcarrier = 0;
  PairMode mode;

  bool relay_aided() const { return std::holds_alternative<RelayAided>(mode); }
  double power() const;
};

struct Allocation {
  std::vector<PairDecision> decisions;
  double sum_rate = 0.0;
  double total_power = 0.0;
};

// Sum of the powers in `decisions`.
double total_power_of(std::span<const PairDecision> decisions);

// Achieved sum rate of `decisions` on `channel` under `protocol`.
double sum_rate_of(std::span<const PairDecision> decisions,
                   const ChannelRealization& channel, ProtocolKind protocol);

// Builds an Allocation, filling sum_rate and total_power from the decisions.
Allocation make_allocation(std::vector<PairDecision> decisions,
                           const ChannelRealization& channel,
                           ProtocolKind protocol);

// Throws std::invalid_argument unless both slot index sets are permutations of
// 0..K-1, every power is nonnegative and finite, user indices are in range,
// and benchmark relay pairs keep p_s2 at zero.
void validate_allocation(const Allocation& alloc,
                         const ChannelRealization& channel,
                         ProtocolKind protocol);

}  // namespace sprelay
