#pragma once

// Random channel generation for the relay-aided downlink geometry and the
// Monte Carlo loop comparing both protocols.

#include <cstdint>
#include <functional>
#include <vector>

#include "sprelay/dualsolve.hpp"
#include "sprelay/model.hpp"

namespace sprelay {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

double distance(Point2 a, Point2 b);

// Default layout: source at the origin, users in a 50 m disc centred 100 m
// away, relay half-way. reference_gain is the average power gain at 1 m;
// distances below 1 m are clamped to 1 m.
struct GeometryConfig {
  Point2 source{0.0, 0.0};
  Point2 relay{50.0, 0.0};
  Point2 region_center{100.0, 0.0};
  double region_radius = 50.0;
  double path_loss_exponent = 3.0;
  int num_taps = 4;
  double reference_gain = 1e6;

  double average_gain(double meters) const;
  void validate() const;
};

// reference_gain that gives the source -> region-centre link unit average gain.
double unit_gain_at_center(const GeometryConfig& g);

// Deterministic 64-bit key for (seed, realization, stream). Every random
// stream is a fresh engine seeded from its key, so realization i does not
// depend on how many realizations are run or in which order.
std::uint64_t stream_key(std::uint64_t seed, std::uint64_t realization,
                         std::uint64_t stream);

/// One channel draw: users uniform in the disc, each link a num_taps i.i.d.
/// Rayleigh tap profile with total power average_gain(distance), transformed
/// to K subcarriers by DFT. Noise power is 1, so |H_k|^2 is the normalized gain.
ChannelRealization generate_realization(const GeometryConfig& geometry,
                                        std::size_t num_subcarriers,
                                        std::size_t num_users,
                                        std::uint64_t seed,
                                        std::uint64_t realization);

struct ExperimentConfig {
  GeometryConfig geometry;
  std::vector<std::size_t> subcarrier_counts{32};
  std::size_t num_users = 5;
  std::vector<double> snr_budget_db{15, 16, 17, 18, 19, 20, 21, 22, 23, 24, 25};
  std::size_t num_realizations = 500;
  std::vector<ProtocolKind> protocols{ProtocolKind::Novel, ProtocolKind::Benchmark};
  std::uint64_t seed = 1;
  double epsilon_rel = 1e-6;
  int max_bisection_iters = 200;
  double bracket_growth = 2.0;

  SolverSettings solver_for(double snr_db) const;
  void validate() const;
};

// Mean sum rate of one protocol in one (K, budget) cell. mean_ratio is the
// mean of per-realization R_protocol / R_benchmark (NaN without a benchmark
// run). `rates` holds every realization's sum rate, NaN where the solver did
// not converge.
struct CellResult {
  std::size_t num_subcarriers = 0;
  double snr_db = 0.0;
  ProtocolKind protocol = ProtocolKind::Novel;
  double mean_rate = 0.0;
  double stderr_rate = 0.0;
  double mean_ratio = 0.0;
  double stderr_ratio = 0.0;
  std::size_t realizations = 0;
  std::size_t nonconverged = 0;
  std::vector<double> rates;
};

struct ExperimentReport {
  std::vector<CellResult> cells;  // K, then budget, then protocol order
};

double db_to_linear(double db);

/// Runs every (K, budget, protocol) cell. Realizations are spread over
/// `workers` threads; the result does not depend on the worker count.
/// `on_cell` is called for each finished cell in report order.
ExperimentReport run_experiment(
    const ExperimentConfig& config, unsigned workers = 1,
    const std::function<void(const CellResult&)>& on_cell = {});

}  // namespace sprelay
