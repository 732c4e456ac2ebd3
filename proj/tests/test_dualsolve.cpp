#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "sprelay/dualsolve.hpp"
#include "sprelay/oracle.hpp"
#include "test_channels.hpp"

using namespace sprelay;

namespace {

constexpr double kLog2e = std::numbers::log2e;

// Same balance check the acceptance suite applies.
void check_relay_balance(const Allocation& a, const ChannelRealization& ch,
                         ProtocolKind protocol) {
  for (const auto& d : a.decisions) {
    const auto* r = std::get_if<RelayAided>(&d.mode);
    if (!r || r->split.total() == 0.0) continue;
    const auto g = pair_gains(ch, d.first_slot_subcarrier, d.second_slot_subcarrier, r->user);
    if (!equiv_gain(g, protocol).relay_active) continue;
    const double relay = g.g_sr_k * r->split.p_s1;
    CHECK(std::abs(relay - mrc_snr(g, r->split)) <= 1e-9 * relay);
  }
}

}  // namespace

TEST_CASE("waterfill_level examples") {
  CHECK(waterfill_level(kLog2e / 2.0, 1.0) == 0.0);
  CHECK(waterfill_level(kLog2e / 4.0, 2.0) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(waterfill_level(0.3, 0.0) == 0.0);
  CHECK_THROWS_AS(waterfill_level(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(waterfill_level(-1.0, 1.0), std::invalid_argument);
}

TEST_CASE("pair_metrics: huge mu collapses every metric") {
  std::mt19937_64 rng(1);
  const auto ch = random_channel(3, 2, rng);
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t l = 0; l < 3; ++l)
      CHECK(pair_metrics(1e6, ch, ProtocolKind::Novel, k, l).metric == 0.0);
}

TEST_CASE("pair_metrics: no relay path leaves the direct metric") {
  const ChannelRealization ch(2, 1, {0, 0}, {1.5, 0.7}, {0, 0});
  const double mu = 0.2;
  auto direct_term = [&](double g) {
    const double level = kLog2e / (2 * mu) - 1 / g;
    return 0.5 * std::log2(1 + g * level) - mu * level;
  };
  const auto c = pair_metrics(mu, ch, ProtocolKind::Novel, 0, 1);
  CHECK(c.metric == doctest::Approx(direct_term(1.5) + direct_term(0.7)).epsilon(1e-13));
  REQUIRE_FALSE(c.decision.relay_aided());
  const auto& d = std::get<Direct>(c.decision.mode);
  CHECK(d.first_power == doctest::Approx(kLog2e / (2 * mu) - 1 / 1.5));
  CHECK(d.second_power == doctest::Approx(kLog2e / (2 * mu) - 1 / 0.7));
}

TEST_CASE("pair_metrics: relay-aided beats direct on the worked example") {
  const ChannelRealization ch(1, 1, {2}, {1}, {3});
  const double mu = kLog2e / 4.0;
  // relay-aided: G = 1.6, level 2 - 1/1.6; direct: two slots of gain 1, level 1
  const double relay = 0.5 * std::log2(1 + 1.6 * 1.375) - mu * 1.375;
  const double direct = 2 * (0.5 * std::log2(2.0) - mu * 1.0);
  REQUIRE(relay > direct);
  const auto c = pair_metrics(mu, ch, ProtocolKind::Novel, 0, 0);
  CHECK(c.metric == doctest::Approx(relay).epsilon(1e-13));
  REQUIRE(c.decision.relay_aided());
  const auto& r = std::get<RelayAided>(c.decision.mode);
  CHECK(r.split.p_s1 == doctest::Approx(0.8 * 1.375));
  CHECK(r.split.p_s2 == doctest::Approx(0.05 * 1.375));
  CHECK(r.split.p_r == doctest::Approx(0.15 * 1.375));
}

TEST_CASE("pair_metrics: ties prefer relay-aided and the lowest user") {
  // identical users, all metrics zero
  const ChannelRealization ch(1, 2, {4}, {1, 1}, {3, 3});
  const auto c = pair_metrics(100.0, ch, ProtocolKind::Novel, 0, 0);
  REQUIRE(c.decision.relay_aided());
  CHECK(std::get<RelayAided>(c.decision.mode).user == 0);
}

TEST_CASE("pair_metrics: an inactive relay path is never reported as relay-aided") {
  // relay link no stronger than the direct link: the relay mode would be a
  // single direct slot, tying the direct mode once slot l gets no power
  const ChannelRealization ch(2, 1, {1, 1}, {1, 1e-9}, {1, 1});
  for (double mu : {0.1, 0.5, 100.0})
    for (auto p : {ProtocolKind::Novel, ProtocolKind::Benchmark})
      CHECK_FALSE(pair_metrics(mu, ch, p, 0, 1).decision.relay_aided());
}

TEST_CASE("solve_lrp limits") {
  std::mt19937_64 rng(2);
  const auto ch = random_channel(3, 2, rng);
  const auto pt = solve_lrp(1e6, ch, ProtocolKind::Novel, 10.0);
  CHECK(pt.sum_power == 0.0);
  CHECK(pt.allocation.sum_rate == 0.0);
  CHECK(pt.dual_value == doctest::Approx(1e7));

  const ChannelRealization one(1, 2, {3}, {0.5, 1.2}, {2, 4});
  for (double mu : {0.05, 0.3, 1.0}) {
    const auto lrp = solve_lrp(mu, one, ProtocolKind::Novel, 5.0);
    const auto c = pair_metrics(mu, one, ProtocolKind::Novel, 0, 0);
    CHECK(lrp.dual_value == doctest::Approx(mu * 5.0 + c.metric));
    CHECK(lrp.sum_power == doctest::Approx(c.decision.power()));
    CHECK(lrp.allocation.decisions.front().relay_aided() == c.decision.relay_aided());
  }
  CHECK_THROWS_AS(solve_lrp(0.0, one, ProtocolKind::Novel, 1.0), std::invalid_argument);
}

TEST_CASE("weak duality against the oracle") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const auto ch = random_channel(2, 1, rng);
    const double p_tot = 10.0;
    for (auto protocol : {ProtocolKind::Novel, ProtocolKind::Benchmark}) {
      const double primal = oracle_solve(ch, protocol, p_tot).sum_rate;
      for (double mu = 0.001; mu < 10.0; mu *= 1.7)
        CHECK(solve_lrp(mu, ch, protocol, p_tot).dual_value >= primal * (1 - 1e-12));
    }
  }
}

TEST_CASE("sum power is non-increasing in mu") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const auto ch = random_channel(1 + t % 6, 1 + t % 3, rng);
    for (auto protocol : {ProtocolKind::Novel, ProtocolKind::Benchmark}) {
      double prev = INFINITY;
      for (int i = 0; i < 20; ++i) {
        const double mu = 0.005 * std::pow(1.4, i);
        const double p = solve_lrp(mu, ch, protocol, 1.0).sum_power;
        CHECK(p <= prev * (1 + 1e-12));
        prev = p;
      }
    }
  }
}

TEST_CASE("solve: direct-only channel reduces to water-filling") {
  // K = 1: both slots use the same subcarrier gain 2; Ptot = 2 splits evenly
  const ChannelRealization one(1, 1, {0}, {2}, {0});
  const auto a = solve(one, ProtocolKind::Novel, SolverSettings::for_budget(2.0));
  REQUIRE_FALSE(a.decisions.front().relay_aided());
  const auto& d = std::get<Direct>(a.decisions.front().mode);
  CHECK(d.first_power == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(d.second_power == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(a.sum_rate == doctest::Approx(std::log2(3.0)).epsilon(1e-6));

  // K = 2: four direct slots with gains {4, 1, 4, 1}; all active when
  // nu = (P + 2/4 + 2/1) / 4 > 1, i.e. P = 6 gives nu = 2.125
  const ChannelRealization two(2, 1, {0, 0}, {4, 1}, {0, 0});
  const auto b = solve(two, ProtocolKind::Benchmark, SolverSettings::for_budget(6.0));
  const double nu = 2.125;
  const double expected = 2 * (0.5 * std::log2(4 * nu) + 0.5 * std::log2(nu));
  CHECK(b.sum_rate == doctest::Approx(expected).epsilon(1e-6));
  CHECK(b.total_power == doctest::Approx(6.0).epsilon(1e-6));
}

TEST_CASE("solve matches the oracle on small random instances") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 40; ++t) {
    const auto ch = random_channel(2, 2, rng);
    const double p_tot = std::pow(10.0, (10 + 10 * (t % 3)) / 10.0);
    for (auto protocol : {ProtocolKind::Novel, ProtocolKind::Benchmark}) {
      const auto settings = SolverSettings::for_budget(p_tot);
      const auto r = solve_detailed(ch, protocol, settings);
      const double oracle = oracle_solve(ch, protocol, p_tot).sum_rate;
      CHECK(std::abs(r.allocation.sum_rate - oracle) <= 1e-6 * oracle);

      const auto& a = r.allocation;
      CHECK_NOTHROW(validate_allocation(a, ch, protocol));
      CHECK(a.total_power <= p_tot * (1 + 1e-12));
      CHECK(a.total_power >= p_tot - settings.epsilon);
      CHECK(r.mu * (p_tot - a.total_power) <= r.mu * settings.epsilon);
      check_relay_balance(a, ch, protocol);
      // zero duality gap, unless the power budget sits on a jump of the
      // sum power, where only weak duality holds
      CHECK(r.dual_bound >= oracle * (1 - 1e-12));
      if (!r.plateau) CHECK((r.dual_bound - oracle) / oracle <= 1e-5);
    }
  }
}

TEST_CASE("novel protocol never does worse than benchmark") {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 30; ++t) {
    const auto ch = random_channel(1 + t % 8, 1 + t % 4, rng);
    const auto s = SolverSettings::for_budget(50.0);
    const double novel = solve(ch, ProtocolKind::Novel, s).sum_rate;
    const double bench = solve(ch, ProtocolKind::Benchmark, s).sum_rate;
    CHECK(novel >= bench * (1 - 1e-6));
  }
}

TEST_CASE("repower_configuration spends the whole budget") {
  std::mt19937_64 rng(7);
  const auto ch = random_channel(4, 2, rng);
  const auto pt = solve_lrp(0.2, ch, ProtocolKind::Novel, 1.0);
  const auto a = repower_configuration(pt.allocation.decisions, ch, ProtocolKind::Novel, 7.5);
  CHECK(a.total_power == doctest::Approx(7.5).epsilon(1e-12));
  check_relay_balance(a, ch, ProtocolKind::Novel);
}

TEST_CASE("non-convergence is reported with the feasible bracket side") {
  std::mt19937_64 rng(8);
  const auto ch = random_channel(4, 2, rng);
  auto s = SolverSettings::for_budget(100.0, 1e-12);
  s.max_bisection_iters = 1;
  try {
    solve(ch, ProtocolKind::Novel, s);
    FAIL("expected NonConvergenceError");
  } catch (const NonConvergenceError& e) {
    CHECK(e.best().sum_power < 100.0);
    CHECK(e.best().mu > 0.0);
  }

  const ChannelRealization dead(2, 1, {0, 0}, {0, 0}, {0, 0});
  CHECK_THROWS_AS(solve(dead, ProtocolKind::Novel, SolverSettings::for_budget(1.0)),
                  NonConvergenceError);
}

TEST_CASE("settings validation") {
  const ChannelRealization ch(1, 1, {1}, {1}, {1});
  SolverSettings s = SolverSettings::for_budget(1.0);
  s.epsilon = 1.0;
  CHECK_THROWS_AS(solve(ch, ProtocolKind::Novel, s), std::invalid_argument);
  s = SolverSettings::for_budget(0.0);
  CHECK_THROWS_AS(solve(ch, ProtocolKind::Novel, s), std::invalid_argument);
  s = SolverSettings::for_budget(1.0);
  s.bracket_growth = 1.0;
  CHECK_THROWS_AS(solve(ch, ProtocolKind::Novel, s), std::invalid_argument);
  s = SolverSettings::for_budget(1.0);
  s.max_bisection_iters = 0;
  CHECK_THROWS_AS(solve(ch, ProtocolKind::Novel, s), std::invalid_argument);
}
