#pragma once

// Dual decomposition solver for sum-rate maximization under a total power
// budget: water-filling per pair at fixed multiplier mu, metric-based mode and
// user choice, Hungarian pairing, and bisection on mu.

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "sprelay/gains.hpp"
#include "sprelay/model.hpp"

namespace sprelay {

struct SolverSettings {
  double p_tot = 1.0;       // total power budget (noise-normalized)
  double epsilon = 1e-6;    // accept mu once p_tot - epsilon <= sum power <= p_tot
  int max_bisection_iters = 200;
  double bracket_growth = 2.0;

  // epsilon = rel_epsilon * p_tot
  static SolverSettings for_budget(double p_tot, double rel_epsilon = 1e-6);
  void validate() const;
};

// [log2(e) / (2 mu) - 1 / g]^+, and 0 for g == 0.
double waterfill_level(double mu, double g);

// Lagrangian contribution C(g * level) - mu * level of one channel with gain g
// at its water-filled level.
double lagrangian_metric(double mu, double g);

// Best mode/user choice for pairing first-slot k with second-slot l at mu,
// with water-filled powers already materialized in `decision`.
struct PairChoice {
  double metric = 0.0;
  PairDecision decision;
};

PairChoice pair_metrics(double mu, const ChannelRealization& channel,
                        ProtocolKind protocol, std::size_t k, std::size_t l);

struct DualPoint {
  double mu = 0.0;
  Allocation allocation;
  double sum_power = 0.0;
  double dual_value = 0.0;  // d(mu) = mu * p_tot + sum of chosen pair metrics
};

// Maximizer of the Lagrangian at fixed mu.
DualPoint solve_lrp(double mu, const ChannelRealization& channel,
                    ProtocolKind protocol, double p_tot);

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, DualPoint best)
      : std::runtime_error(what), best_(std::move(best)) {}
  // Feasible side of the final bracket.
  const DualPoint& best() const { return best_; }

 private:
  DualPoint best_;
};

struct SolveResult {
  Allocation allocation;
  double mu = 0.0;           // multiplier whose LRP maximizer was returned
  double dual_bound = 0.0;   // smallest d(mu) seen; upper bound on the optimum
  int lrp_solves = 0;
  bool plateau = false;      // bracket collapsed on a jump of sum power
};

/// Bracket doubling on mu until the LRP uses less than p_tot, then bisection
/// until the sum power falls into [p_tot - epsilon, p_tot].
///
/// When the sum power jumps across that band (the assignment switches between
/// two pairings), the bracket collapses instead; the configurations on both
/// sides are then re-water-filled over the full budget and the better one is
/// returned. Throws NonConvergenceError when max_bisection_iters is exhausted.
SolveResult solve_detailed(const ChannelRealization& channel,
                           ProtocolKind protocol,
                           const SolverSettings& settings);

Allocation solve(const ChannelRealization& channel, ProtocolKind protocol,
                 const SolverSettings& settings);

// Optimal water-filling of `p_tot` over the effective gains of the fixed
// pairing, modes and users in `decisions`. Relay-aided pairs keep their
// protocol's optimal split. Returns the re-powered allocation.
Allocation repower_configuration(const std::vector<PairDecision>& decisions,
                                 const ChannelRealization& channel,
                                 ProtocolKind protocol, double p_tot);

}  // namespace sprelay
