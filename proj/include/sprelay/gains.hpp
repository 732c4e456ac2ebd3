#pragma once

// Per-pair closed forms: MRC SNR, relay-aided rates, and the equivalent gain
// with its optimal power split for both protocols.

#include "sprelay/model.hpp"

namespace sprelay {

// Gains seen by one relay-aided transmission over subcarrier pair (k, l) to
// user u.
struct PairGains {
  double g_sr_k = 0.0;
  double g_su_k = 0.0;
  double g_su_l = 0.0;
  double g_ru_l = 0.0;
};

PairGains pair_gains(const ChannelRealization& channel, std::size_t k,
                     std::size_t l, std::size_t user);

// SNR at the user after combining both slots.
double mrc_snr(const PairGains& gains, const PowerSplit& split);

// min{relay SNR, user SNR} for the given split; the rate is rate_of_snr of it.
double relay_snr(const PairGains& gains, const PowerSplit& split,
                 ProtocolKind protocol);

double relay_rate(const PairGains& gains, const PowerSplit& split,
                  ProtocolKind protocol);

/// Equivalent gain G of a relay-aided pair: with total pair power P the best
/// achievable rate is rate_of_snr(G * P), reached by `fractions.scaled(P)`.
struct EquivalentGain {
  double gain = 0.0;
  PowerSplit fractions{1.0, 0.0, 0.0};
  bool relay_active = false;  // false when the relay adds nothing
};

EquivalentGain equiv_gain_benchmark(const PairGains& gains);
EquivalentGain equiv_gain_novel(const PairGains& gains);
EquivalentGain equiv_gain(const PairGains& gains, ProtocolKind protocol);

// Effective gain of a direct-mode slot: the source-user gain itself.
double direct_gain(double g_su);

}  // namespace sprelay
