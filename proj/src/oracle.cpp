#include "sprelay/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sprelay/gains.hpp"

namespace sprelay {

WaterfillResult waterfill_total(const std::vector<double>& gains, double p_tot) {
  if (!(p_tot >= 0.0) || !std::isfinite(p_tot))
    throw std::invalid_argument("waterfill_total: p_tot must be finite and >= 0");
  WaterfillResult out;
  out.powers.assign(gains.size(), 0.0);

  double max_floor = 0.0;
  bool any_usable = false;
  for (double g : gains) {
    if (g < 0.0 || !std::isfinite(g))
      throw std::invalid_argument("waterfill_total: gains must be finite and >= 0");
    if (g > 0.0) {
      any_usable = true;
      max_floor = std::max(max_floor, 1.0 / g);
    }
  }
  if (!any_usable) {
    out.power_unassigned = p_tot > 0.0;
    return out;
  }
  if (p_tot == 0.0) return out;

  auto filled = [&](double level) {
    double s = 0.0;
    for (double g : gains)
      if (g > 0.0) s += std::max(level - 1.0 / g, 0.0);
    return s;
  };
  // filled(lo) <= p_tot <= filled(hi)
  double lo = 0.0;
  double hi = p_tot + max_floor;
  double level = hi;
  for (int it = 0; it < 400; ++it) {
    level = 0.5 * (lo + hi);
    const double s = filled(level);
    if (std::abs(s - p_tot) <= 1e-12 * p_tot) break;
    (s > p_tot ? hi : lo) = level;
  }
  for (std::size_t i = 0; i < gains.size(); ++i) {
    if (gains[i] > 0.0) out.powers[i] = std::max(level - 1.0 / gains[i], 0.0);
    out.sum_rate += rate_of_snr(gains[i] * out.powers[i]);
  }
  return out;
}

Allocation oracle_solve(const ChannelRealization& channel,
                        ProtocolKind protocol, double p_tot) {
  const std::size_t K = channel.num_subcarriers();
  const std::size_t U = channel.num_users();
  if (K > kOracleMaxSubcarriers || U > kOracleMaxUsers)
    throw std::invalid_argument("oracle_solve: instance too large (K <= 6, U <= 3)");

  // Direct mode only needs the strongest user per slot: the water-filled sum
  // rate is nondecreasing in every gain, so weaker (a, b) choices are dominated.
  std::vector<std::size_t> strongest(K, 0);
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t u = 1; u < U; ++u)
      if (channel.su(u, k) > channel.su(strongest[k], k)) strongest[k] = u;

  // Options per pair: 0..U-1 relay-aided to that user, U direct.
  const std::size_t options = U + 1;
  std::vector<std::size_t> perm(K);
  std::iota(perm.begin(), perm.end(), 0);

  double best_rate = -1.0;
  std::vector<std::size_t> best_perm;
  std::vector<std::size_t> best_choice;
  std::vector<double> best_powers;

  std::vector<double> gains;
  do {
    std::vector<std::size_t> choice(K, 0);
    while (true) {
      gains.clear();
      for (std::size_t k = 0; k < K; ++k) {
        const std::size_t l = perm[k];
        if (choice[k] < U) {
          gains.push_back(equiv_gain(pair_gains(channel, k, l, choice[k]), protocol).gain);
        } else {
          gains.push_back(channel.su(strongest[k], k));
          gains.push_back(channel.su(strongest[l], l));
        }
      }
      WaterfillResult wf = waterfill_total(gains, p_tot);
      if (wf.sum_rate > best_rate) {
        best_rate = wf.sum_rate;
        best_perm = perm;
        best_choice = choice;
        best_powers = std::move(wf.powers);
      }
      // odometer, last pair varies fastest
      std::size_t pos = K;
      while (pos > 0 && ++choice[pos - 1] == options) choice[--pos] = 0;
      if (pos == 0) break;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  std::vector<PairDecision> decisions;
  std::size_t slot = 0;
  for (std::size_t k = 0; k < K; ++k) {
    PairDecision d;
    d.first_slot_subcarrier = k;
    d.second_slot_subcarrier = best_perm[k];
    if (best_choice[k] < U) {
      const auto eq = equiv_gain(pair_gains(channel, k, best_perm[k], best_choice[k]), protocol);
      d.mode = RelayAided{best_choice[k], eq.fractions.scaled(best_powers[slot++])};
    } else {
      const double p = best_powers[slot++];
      const double q = best_powers[slot++];
      d.mode = Direct{strongest[k], p, strongest[best_perm[k]], q};
    }
    decisions.push_back(std::move(d));
  }
  return make_allocation(std::move(decisions), channel, protocol);
}

}  // namespace sprelay
