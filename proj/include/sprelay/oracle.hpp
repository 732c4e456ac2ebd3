#pragma once

// Brute-force reference solver for small instances. Used only by tests.

#include <vector>

#include "sprelay/model.hpp"

namespace sprelay {

struct WaterfillResult {
  std::vector<double> powers;
  double sum_rate = 0.0;
  bool power_unassigned = false;  // every gain was zero and p_tot > 0
};

// p_i = [nu - 1/g_i]^+ with nu found by bisection so that sum p_i = p_tot.
WaterfillResult waterfill_total(const std::vector<double>& gains, double p_tot);

inline constexpr std::size_t kOracleMaxSubcarriers = 6;
inline constexpr std::size_t kOracleMaxUsers = 3;

/// Enumerates every second-slot permutation and every per-pair mode/user
/// choice, water-fills p_tot over each configuration's effective gains and
/// returns the best configuration. Ties keep the lexicographically first one.
/// Throws std::invalid_argument when K > 6 or U > 3.
Allocation oracle_solve(const ChannelRealization& channel,
                        ProtocolKind protocol, double p_tot);

}  // namespace sprelay
