#include "sprelay/dualsolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "sprelay/assign.hpp"

namespace sprelay {

namespace {

constexpr double kLog2e = std::numbers::log2e;

// Index of the user with the largest source-user gain on subcarrier k; lowest
// index wins ties.
std::size_t best_direct_user(const ChannelRealization& ch, std::size_t k) {
  std::size_t best = 0;
  for (std::size_t u = 1; u < ch.num_users(); ++u)
    if (ch.su(u, k) > ch.su(best, k)) best = u;
  return best;
}

// Picks the larger of the best relay-aided metric and the direct metric.
// Relay-aided wins ties, then the lowest user index. A user whose relay path
// is inactive is skipped: that mode is one direct slot on k, which the direct
// mode already covers.
template <typename EqGainOf>
PairChoice choose(double mu, const ChannelRealization& ch, std::size_t k,
                  std::size_t l, EqGainOf&& eq_gain_of, std::size_t user_k,
                  std::size_t user_l) {
  std::size_t best_user = 0;
  double best_relay = -std::numeric_limits<double>::infinity();
  EquivalentGain best_eq;
  for (std::size_t u = 0; u < ch.num_users(); ++u) {
    const EquivalentGain& eq = eq_gain_of(u);
    if (!eq.relay_active) continue;
    const double a = lagrangian_metric(mu, eq.gain);
    if (a > best_relay) {
      best_relay = a;
      best_user = u;
      best_eq = eq;
    }
  }
  const double g_k = ch.su(user_k, k);
  const double g_l = ch.su(user_l, l);
  const double direct = lagrangian_metric(mu, g_k) + lagrangian_metric(mu, g_l);

  PairChoice out;
  out.decision.first_slot_subcarrier = k;
  out.decision.second_slot_subcarrier = l;
  if (best_relay >= direct) {
    out.metric = best_relay;
    out.decision.mode =
        RelayAided{best_user, best_eq.fractions.scaled(waterfill_level(mu, best_eq.gain))};
  } else {
    out.metric = direct;
    out.decision.mode = Direct{user_k, waterfill_level(mu, g_k), user_l,
                               waterfill_level(mu, g_l)};
  }
  return out;
}

// Equivalent gains of every (k, l, u) for one channel and protocol, computed
// once per solve.
class LrpEngine {
 public:
  LrpEngine(const ChannelRealization& ch, ProtocolKind protocol)
      : ch_(ch), protocol_(protocol), k_(ch.num_subcarriers()), u_(ch.num_users()) {
    eq_.reserve(k_ * k_ * u_);
    for (std::size_t k = 0; k < k_; ++k)
      for (std::size_t l = 0; l < k_; ++l)
        for (std::size_t u = 0; u < u_; ++u)
          eq_.push_back(equiv_gain(pair_gains(ch, k, l, u), protocol));
    direct_user_.resize(k_);
    for (std::size_t k = 0; k < k_; ++k) direct_user_[k] = best_direct_user(ch, k);
  }

  DualPoint eval(double mu, double p_tot) const {
    ProfitMatrix profits(k_);
    std::vector<PairDecision> choices;
    choices.reserve(k_ * k_);
    for (std::size_t k = 0; k < k_; ++k) {
      for (std::size_t l = 0; l < k_; ++l) {
        const EquivalentGain* row = &eq_[(k * k_ + l) * u_];
        auto c = choose(
            mu, ch_, k, l, [row](std::size_t u) -> const EquivalentGain& { return row[u]; },
            direct_user_[k], direct_user_[l]);
        profits(k, l) = c.metric;
        choices.push_back(std::move(c.decision));
      }
    }
    const Assignment match = solve_assignment(profits);
    std::vector<PairDecision> decisions;
    decisions.reserve(k_);
    for (std::size_t k = 0; k < k_; ++k)
      decisions.push_back(choices[k * k_ + match.permutation[k]]);

    DualPoint pt;
    pt.mu = mu;
    pt.allocation = make_allocation(std::move(decisions), ch_, protocol_);
    pt.sum_power = pt.allocation.total_power;
    pt.dual_value = mu * p_tot + match.total_profit;
    return pt;
  }

  const ChannelRealization& channel() const { return ch_; }
  ProtocolKind protocol() const { return protocol_; }

 private:
  const ChannelRealization& ch_;
  ProtocolKind protocol_;
  std::size_t k_;
  std::size_t u_;
  std::vector<EquivalentGain> eq_;  // index (k * K + l) * U + u
  std::vector<std::size_t> direct_user_;
};

struct Repowered {
  Allocation allocation;
  double water_level = 0.0;  // 0 when no channel is usable
};

// Exact water-filling: sort the 1/g floors and find the active prefix.
double water_level_exact(const std::vector<double>& gains, double p_tot) {
  std::vector<double> floors;
  for (double g : gains)
    if (g > 0.0) floors.push_back(1.0 / g);
  if (floors.empty()) return 0.0;
  std::sort(floors.begin(), floors.end());
  double acc = 0.0;
  double level = 0.0;
  for (std::size_t m = 0; m < floors.size(); ++m) {
    acc += floors[m];
    level = (p_tot + acc) / static_cast<double>(m + 1);
    if (m + 1 == floors.size() || level <= floors[m + 1]) break;
  }
  return level;
}

Repowered repower(const std::vector<PairDecision>& decisions,
                  const ChannelRealization& ch, ProtocolKind protocol,
                  double p_tot) {
  std::vector<double> gains;
  std::vector<EquivalentGain> relay_eq(decisions.size());
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    const auto& d = decisions[i];
    if (const auto* r = std::get_if<RelayAided>(&d.mode)) {
      relay_eq[i] = equiv_gain(
          pair_gains(ch, d.first_slot_subcarrier, d.second_slot_subcarrier, r->user),
          protocol);
      gains.push_back(relay_eq[i].gain);
    } else {
      const auto& dm = std::get<Direct>(d.mode);
      gains.push_back(ch.su(dm.first_user, d.first_slot_subcarrier));
      gains.push_back(ch.su(dm.second_user, d.second_slot_subcarrier));
    }
  }
  const double level = water_level_exact(gains, p_tot);
  auto power_for = [level](double g) {
    return g > 0.0 ? std::max(level - 1.0 / g, 0.0) : 0.0;
  };

  std::vector<PairDecision> out = decisions;
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto& d = out[i];
    if (auto* r = std::get_if<RelayAided>(&d.mode)) {
      r->split = relay_eq[i].fractions.scaled(power_for(relay_eq[i].gain));
    } else {
      auto& dm = std::get<Direct>(d.mode);
      dm.first_power = power_for(ch.su(dm.first_user, d.first_slot_subcarrier));
      dm.second_power = power_for(ch.su(dm.second_user, d.second_slot_subcarrier));
    }
  }
  return {make_allocation(std::move(out), ch, protocol), level};
}

// Decision for pair (k, l) in the given mode: relay-aided to the user with
// the largest equivalent gain, or direct to the strongest user on each slot.
// Falls back to direct when no user has an active relay path. Powers are left
// for repower().
PairDecision decision_in_mode(std::size_t k, std::size_t l, bool relay,
                              const ChannelRealization& ch, ProtocolKind protocol) {
  PairDecision out;
  out.first_slot_subcarrier = k;
  out.second_slot_subcarrier = l;
  std::size_t best = 0;
  double best_gain = -1.0;
  for (std::size_t u = 0; relay && u < ch.num_users(); ++u) {
    const auto eq = equiv_gain(pair_gains(ch, k, l, u), protocol);
    if (eq.relay_active && eq.gain > best_gain) {
      best_gain = eq.gain;
      best = u;
    }
  }
  if (best_gain < 0.0) {
    out.mode = Direct{best_direct_user(ch, k), 0.0, best_direct_user(ch, l), 0.0};
    return out;
  }
  out.mode = RelayAided{best, {}};
  return out;
}

// First-improvement hill climb over two moves: flipping the mode of one pair,
// and exchanging the second-slot subcarriers of two pairs (any modes).
Repowered local_search(Repowered current, const ChannelRealization& ch,
                       ProtocolKind protocol, double p_tot) {
  const std::size_t n = current.allocation.decisions.size();
  auto try_move = [&](std::vector<PairDecision>&& decisions) {
    Repowered cand = repower(decisions, ch, protocol, p_tot);
    if (!(cand.allocation.sum_rate > current.allocation.sum_rate * (1.0 + 1e-13)))
      return false;
    current = std::move(cand);
    return true;
  };
  bool improved = true;
  for (int sweep = 0; improved && sweep < 64; ++sweep) {
    improved = false;
    for (std::size_t i = 0; i < n; ++i) {
      auto decisions = current.allocation.decisions;
      const auto& d = decisions[i];
      decisions[i] = decision_in_mode(d.first_slot_subcarrier, d.second_slot_subcarrier,
                                      !d.relay_aided(), ch, protocol);
      improved |= try_move(std::move(decisions));
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        for (int modes = 0; modes < 4; ++modes) {
          auto decisions = current.allocation.decisions;
          const auto ki = decisions[i].first_slot_subcarrier;
          const auto kj = decisions[j].first_slot_subcarrier;
          const auto li = decisions[i].second_slot_subcarrier;
          const auto lj = decisions[j].second_slot_subcarrier;
          decisions[i] = decision_in_mode(ki, lj, modes & 1, ch, protocol);
          decisions[j] = decision_in_mode(kj, li, modes & 2, ch, protocol);
          improved |= try_move(std::move(decisions));
        }
      }
    }
  }
  return current;
}

}  // namespace

SolverSettings SolverSettings::for_budget(double p_tot, double rel_epsilon) {
  SolverSettings s;
  s.p_tot = p_tot;
  s.epsilon = rel_epsilon * p_tot;
  return s;
}

void SolverSettings::validate() const {
  if (!(p_tot > 0.0) || !std::isfinite(p_tot))
    throw std::invalid_argument("solver: p_tot must be positive and finite");
  if (!(epsilon > 0.0) || !(epsilon < p_tot))
    throw std::invalid_argument("solver: epsilon must satisfy 0 < epsilon < p_tot");
  if (max_bisection_iters <= 0)
    throw std::invalid_argument("solver: max_bisection_iters must be positive");
  if (!(bracket_growth > 1.0) || !std::isfinite(bracket_growth))
    throw std::invalid_argument("solver: bracket_growth must be > 1");
}

double waterfill_level(double mu, double g) {
  if (!(mu > 0.0)) throw std::invalid_argument("waterfill_level: mu must be > 0");
  if (g <= 0.0) return 0.0;
  return std::max(kLog2e / (2.0 * mu) - 1.0 / g, 0.0);
}

double lagrangian_metric(double mu, double g) {
  const double level = waterfill_level(mu, g);
  if (level == 0.0) return 0.0;
  return rate_of_snr(g * level) - mu * level;
}

PairChoice pair_metrics(double mu, const ChannelRealization& channel,
                        ProtocolKind protocol, std::size_t k, std::size_t l) {
  if (!(mu > 0.0)) throw std::invalid_argument("pair_metrics: mu must be > 0");
  if (k >= channel.num_subcarriers() || l >= channel.num_subcarriers())
    throw std::invalid_argument("pair_metrics: subcarrier index out of range");
  std::vector<EquivalentGain> eq;
  for (std::size_t u = 0; u < channel.num_users(); ++u)
    eq.push_back(equiv_gain(pair_gains(channel, k, l, u), protocol));
  return choose(
      mu, channel, k, l, [&eq](std::size_t u) -> const EquivalentGain& { return eq[u]; },
      best_direct_user(channel, k), best_direct_user(channel, l));
}

DualPoint solve_lrp(double mu, const ChannelRealization& channel,
                    ProtocolKind protocol, double p_tot) {
  if (!(mu > 0.0)) throw std::invalid_argument("solve_lrp: mu must be > 0");
  return LrpEngine(channel, protocol).eval(mu, p_tot);
}

Allocation repower_configuration(const std::vector<PairDecision>& decisions,
                                 const ChannelRealization& channel,
                                 ProtocolKind protocol, double p_tot) {
  return repower(decisions, channel, protocol, p_tot).allocation;
}

SolveResult solve_detailed(const ChannelRealization& channel,
                           ProtocolKind protocol,
                           const SolverSettings& settings) {
  settings.validate();
  const LrpEngine engine(channel, protocol);
  const double p_tot = settings.p_tot;
  const double eps = settings.epsilon;

  SolveResult result;
  result.dual_bound = std::numeric_limits<double>::infinity();
  auto eval = [&](double mu) {
    DualPoint pt = engine.eval(mu, p_tot);
    ++result.lrp_solves;
    result.dual_bound = std::min(result.dual_bound, pt.dual_value);
    return pt;
  };
  auto in_band = [&](const DualPoint& pt) {
    return pt.sum_power >= p_tot - eps && pt.sum_power <= p_tot;
  };
  auto finish = [&](DualPoint&& pt) {
    result.mu = pt.mu;
    result.allocation = std::move(pt.allocation);
    return result;
  };

  double mu_min = 0.0;
  double mu_max = 1.0;
  DualPoint hi = eval(mu_max);
  while (hi.sum_power >= p_tot) {
    if (in_band(hi)) return finish(std::move(hi));
    mu_max *= settings.bracket_growth;
    hi = eval(mu_max);
  }
  if (in_band(hi)) return finish(std::move(hi));

  std::optional<DualPoint> lo;
  for (int it = 0; it < settings.max_bisection_iters; ++it) {
    const double mu = 0.5 * (mu_min + mu_max);
    DualPoint pt = eval(mu);
    if (in_band(pt)) return finish(std::move(pt));
    if (pt.sum_power > p_tot) {
      mu_min = mu;
      lo = std::move(pt);
    } else {
      mu_max = mu;
      hi = std::move(pt);
    }
    if (!lo || mu_max - mu_min > 1e-14 * mu_max) continue;

    // Sum power jumps across the band at this mu. Re-water-fill both
    // bracketing configurations over the full budget and keep the better one.
    // Several configurations can tie at the jump, so each candidate is then
    // refined by local search.
    auto refine = [&](const DualPoint& side) {
      return local_search(
          repower(side.allocation.decisions, channel, protocol, p_tot), channel,
          protocol, p_tot);
    };
    Repowered best = refine(hi);
    Repowered other = refine(*lo);
    if (other.allocation.sum_rate > best.allocation.sum_rate) best = std::move(other);
    // Probe the LRP at the multiplier implied by the current water level; a
    // different maximizer there may do better with the full budget.
    for (int probe = 0; probe < 8 && best.water_level > 0.0; ++probe) {
      const DualPoint at = eval(kLog2e / (2.0 * best.water_level));
      Repowered cand = refine(at);
      if (!(cand.allocation.sum_rate > best.allocation.sum_rate)) break;
      best = std::move(cand);
    }
    result.mu = hi.mu;
    result.allocation = std::move(best.allocation);
    result.plateau = true;
    return result;
  }
  throw NonConvergenceError(
      "solver did not reach the power band within " +
          std::to_string(settings.max_bisection_iters) + " bisection steps",
      std::move(hi));
}

Allocation solve(const ChannelRealization& channel, ProtocolKind protocol,
                 const SolverSettings& settings) {
  return solve_detailed(channel, protocol, settings).allocation;
}

}  // namespace sprelay
