#include "sprelay/gains.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sprelay {

namespace {

void require_nonnegative(const PowerSplit& s) {
  if (!(s.p_s1 >= 0.0) || !(s.p_s2 >= 0.0) || !(s.p_r >= 0.0))
    throw std::invalid_argument("power split components must be >= 0");
}

void require_valid(const PairGains& g) {
  for (double v : {g.g_sr_k, g.g_su_k, g.g_su_l, g.g_ru_l})
    if (!std::isfinite(v) || v < 0.0)
      throw std::invalid_argument("pair gains must be finite and >= 0");
}

}  // namespace

PairGains pair_gains(const ChannelRealization& channel, std::size_t k,
                     std::size_t l, std::size_t user) {
  return {channel.sr(k), channel.su(user, k), channel.su(user, l),
          channel.ru(user, l)};
}

double mrc_snr(const PairGains& gains, const PowerSplit& split) {
  require_valid(gains);
  require_nonnegative(split);
  const double beam = std::sqrt(gains.g_su_l * split.p_s2) +
                      std::sqrt(gains.g_ru_l * split.p_r);
  return gains.g_su_k * split.p_s1 + beam * beam;
}

double relay_snr(const PairGains& gains, const PowerSplit& split,
                 ProtocolKind protocol) {
  if (protocol == ProtocolKind::Benchmark && split.p_s2 != 0.0)
    throw std::invalid_argument(
        "benchmark protocol: source cannot transmit on the second-slot subcarrier");
  return std::min(gains.g_sr_k * split.p_s1, mrc_snr(gains, split));
}

double relay_rate(const PairGains& gains, const PowerSplit& split,
                  ProtocolKind protocol) {
  return rate_of_snr(relay_snr(gains, split, protocol));
}

// Relay-active branch when min{g_sr, g_ru} > g_su_k: p_s1 balances the relay
// SNR against g_su_k * p_s1 + g_ru * p_r.
EquivalentGain equiv_gain_benchmark(const PairGains& gains) {
  require_valid(gains);
  const double g_sr = gains.g_sr_k;
  const double g_ru = gains.g_ru_l;
  EquivalentGain out;
  if (std::min(g_sr, g_ru) > gains.g_su_k) {
    const double denom = (g_sr - gains.g_su_k) + g_ru;
    out.gain = g_sr * g_ru / denom;
    out.fractions.p_s1 = g_ru / denom;
    out.fractions.p_s2 = 0.0;
    out.fractions.p_r = 1.0 - out.fractions.p_s1;
    out.relay_active = true;
  } else {
    out.gain = std::min(g_sr, gains.g_su_k);
  }
  return out;
}

// Same balance, but the second-slot power is beamformed by source and relay;
// the coherent gain is g_su_l + g_ru_l with power shared in proportion to the
// two link gains.
EquivalentGain equiv_gain_novel(const PairGains& gains) {
  require_valid(gains);
  const double g_sr = gains.g_sr_k;
  const double sum_l = gains.g_su_l + gains.g_ru_l;
  EquivalentGain out;
  if (std::min(g_sr, sum_l) > gains.g_su_k) {
    const double diff_k = g_sr - gains.g_su_k;
    const double denom = diff_k + sum_l;
    out.gain = g_sr * sum_l / denom;
    out.fractions.p_s1 = sum_l / denom;
    out.fractions.p_s2 = (gains.g_su_l / sum_l) * (diff_k / denom);
    out.fractions.p_r =
        std::max(0.0, 1.0 - out.fractions.p_s1 - out.fractions.p_s2);
    out.relay_active = true;
  } else {
    out.gain = std::min(g_sr, gains.g_su_k);
  }
  return out;
}

EquivalentGain equiv_gain(const PairGains& gains, ProtocolKind protocol) {
  return protocol == ProtocolKind::Novel ? equiv_gain_novel(gains)
                                         : equiv_gain_benchmark(gains);
}

double direct_gain(double g_su) {
  if (!std::isfinite(g_su) || g_su < 0.0)
    throw std::invalid_argument("direct gain must be finite and >= 0");
  return g_su;
}

}  // namespace sprelay
