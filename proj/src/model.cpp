#include "sprelay/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sprelay/gains.hpp"

namespace sprelay {

std::string_view to_string(ProtocolKind p) {
  return p == ProtocolKind::Novel ? "novel" : "benchmark";
}

double rate_of_snr(double snr) {
  if (!std::isfinite(snr) || snr < 0.0)
    throw std::invalid_argument("rate_of_snr: snr must be finite and >= 0");
  return 0.5 * std::log2(1.0 + snr);
}

namespace {

void check_gains(std::span<const double> v, std::size_t expected,
                 const char* name) {
  if (v.size() != expected)
    throw std::invalid_argument(std::string("ChannelRealization: ") + name +
                                " has wrong size");
  for (double g : v)
    if (!std::isfinite(g) || g < 0.0)
      throw std::invalid_argument(std::string("ChannelRealization: ") + name +
                                  " must be finite and >= 0");
}

bool valid_power(double p) { return std::isfinite(p) && p >= 0.0; }

}  // namespace

ChannelRealization::ChannelRealization(std::size_t num_subcarriers,
                                       std::size_t num_users,
                                       std::vector<double> g_sr,
                                       std::vector<double> g_su,
                                       std::vector<double> g_ru)
    : k_(num_subcarriers),
      u_(num_users),
      g_sr_(std::move(g_sr)),
      g_su_(std::move(g_su)),
      g_ru_(std::move(g_ru)) {
  if (k_ == 0 || u_ == 0)
    throw std::invalid_argument("ChannelRealization: K and U must be positive");
  check_gains(g_sr_, k_, "g_sr");
  check_gains(g_su_, k_ * u_, "g_su");
  check_gains(g_ru_, k_ * u_, "g_ru");
}

double PairDecision::power() const {
  if (const auto* r = std::get_if<RelayAided>(&mode)) return r->split.total();
  const auto& d = std::get<Direct>(mode);
  return d.first_power + d.second_power;
}

double total_power_of(std::span<const PairDecision> decisions) {
  double total = 0.0;
  for (const auto& d : decisions) total += d.power();
  return total;
}

double sum_rate_of(std::span<const PairDecision> decisions,
                   const ChannelRealization& channel, ProtocolKind protocol) {
  double rate = 0.0;
  for (const auto& d : decisions) {
    const auto k = d.first_slot_subcarrier;
    const auto l = d.second_slot_subcarrier;
    if (const auto* r = std::get_if<RelayAided>(&d.mode)) {
      rate += relay_rate(pair_gains(channel, k, l, r->user), r->split, protocol);
    } else {
      const auto& dm = std::get<Direct>(d.mode);
      rate += rate_of_snr(direct_gain(channel.su(dm.first_user, k)) * dm.first_power);
      rate += rate_of_snr(direct_gain(channel.su(dm.second_user, l)) * dm.second_power);
    }
  }
  return rate;
}

Allocation make_allocation(std::vector<PairDecision> decisions,
                           const ChannelRealization& channel,
                           ProtocolKind protocol) {
  Allocation a;
  a.sum_rate = sum_rate_of(decisions, channel, protocol);
  a.total_power = total_power_of(decisions);
  a.decisions = std::move(decisions);
  return a;
}

void validate_allocation(const Allocation& alloc,
                         const ChannelRealization& channel,
                         ProtocolKind protocol) {
  const auto K = channel.num_subcarriers();
  const auto U = channel.num_users();
  if (alloc.decisions.size() != K)
    throw std::invalid_argument("allocation must hold exactly K pair decisions");
  std::vector<bool> first_seen(K, false), second_seen(K, false);
  for (const auto& d : alloc.decisions) {
    const auto k = d.first_slot_subcarrier;
    const auto l = d.second_slot_subcarrier;
    if (k >= K || l >= K || first_seen[k] || second_seen[l])
      throw std::invalid_argument("slot indices are not a permutation of 0..K-1");
    first_seen[k] = second_seen[l] = true;
    if (const auto* r = std::get_if<RelayAided>(&d.mode)) {
      if (r->user >= U) throw std::invalid_argument("user index out of range");
      const auto& s = r->split;
      if (!valid_power(s.p_s1) || !valid_power(s.p_s2) || !valid_power(s.p_r))
        throw std::invalid_argument("relay-aided powers must be finite and >= 0");
      if (protocol == ProtocolKind::Benchmark && s.p_s2 != 0.0)
        throw std::invalid_argument("benchmark relay-aided pair uses p_s2 > 0");
    } else {
      const auto& dm = std::get<Direct>(d.mode);
      if (dm.first_user >= U || dm.second_user >= U)
        throw std::invalid_argument("user index out of range");
      if (!valid_power(dm.first_power) || !valid_power(dm.second_power))
        throw std::invalid_argument("direct powers must be finite and >= 0");
    }
  }
}

}  // namespace sprelay
