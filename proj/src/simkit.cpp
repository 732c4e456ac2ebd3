#include "sprelay/simkit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <exception>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

namespace sprelay {

double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

double GeometryConfig::average_gain(double meters) const {
  return reference_gain * std::pow(std::max(meters, 1.0), -path_loss_exponent);
}

void GeometryConfig::validate() const {
  if (!(region_radius > 0.0)) throw std::invalid_argument("geometry: radius must be > 0");
  if (!(path_loss_exponent > 0.0))
    throw std::invalid_argument("geometry: path loss exponent must be > 0");
  if (num_taps < 1) throw std::invalid_argument("geometry: num_taps must be >= 1");
  if (!(reference_gain > 0.0) || !std::isfinite(reference_gain))
    throw std::invalid_argument("geometry: reference_gain must be positive");
}

double unit_gain_at_center(const GeometryConfig& g) {
  return std::pow(std::max(distance(g.source, g.region_center), 1.0),
                  g.path_loss_exponent);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Stream ids inside one realization.
constexpr std::uint64_t kSourceRelayStream = 0;
std::uint64_t position_stream(std::size_t u) { return 1 + 3 * u; }
std::uint64_t source_user_stream(std::size_t u) { return 2 + 3 * u; }
std::uint64_t relay_user_stream(std::size_t u) { return 3 + 3 * u; }

// |H_k|^2 for k = 0..K-1 of a Rayleigh tap profile with total mean power.
void link_gains(std::uint64_t key, double mean_power, int taps, std::size_t K,
                double* out) {
  std::mt19937_64 rng(key);
  std::normal_distribution<double> normal(0.0, std::sqrt(mean_power / (2.0 * taps)));
  std::vector<std::complex<double>> h(static_cast<std::size_t>(taps));
  for (auto& t : h) {
    const double re = normal(rng);
    const double im = normal(rng);
    t = {re, im};
  }
  for (std::size_t k = 0; k < K; ++k) {
    std::complex<double> H{0.0, 0.0};
    for (std::size_t t = 0; t < h.size(); ++t) {
      const double phase = -2.0 * std::numbers::pi * static_cast<double>(t * k % K) /
                           static_cast<double>(K);
      H += h[t] * std::polar(1.0, phase);
    }
    out[k] = std::norm(H);
  }
}

Point2 uniform_in_disc(std::uint64_t key, Point2 center, double radius) {
  std::mt19937_64 rng(key);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r = radius * std::sqrt(unit(rng));
  const double theta = 2.0 * std::numbers::pi * unit(rng);
  return {center.x + r * std::cos(theta), center.y + r * std::sin(theta)};
}

struct Stats {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};

Stats summarize(const std::vector<double>& xs) {
  Stats s;
  double sum = 0.0;
  for (double x : xs)
    if (std::isfinite(x)) {
      sum += x;
      ++s.n;
    }
  if (s.n == 0) {
    s.mean = std::numeric_limits<double>::quiet_NaN();
    s.stderr_ = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  s.mean = sum / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double x : xs)
      if (std::isfinite(x)) ss += (x - s.mean) * (x - s.mean);
    s.stderr_ = std::sqrt(ss / static_cast<double>(s.n - 1) / static_cast<double>(s.n));
  }
  return s;
}

}  // namespace

std::uint64_t stream_key(std::uint64_t seed, std::uint64_t realization,
                         std::uint64_t stream) {
  return splitmix64(splitmix64(splitmix64(seed) ^ realization) ^ stream);
}

ChannelRealization generate_realization(const GeometryConfig& geometry,
                                        std::size_t K, std::size_t U,
                                        std::uint64_t seed,
                                        std::uint64_t realization) {
  geometry.validate();
  if (K == 0 || U == 0)
    throw std::invalid_argument("generate_realization: K and U must be positive");
  std::vector<double> g_sr(K), g_su(U * K), g_ru(U * K);
  link_gains(stream_key(seed, realization, kSourceRelayStream),
             geometry.average_gain(distance(geometry.source, geometry.relay)),
             geometry.num_taps, K, g_sr.data());
  for (std::size_t u = 0; u < U; ++u) {
    const Point2 pos = uniform_in_disc(stream_key(seed, realization, position_stream(u)),
                                       geometry.region_center, geometry.region_radius);
    link_gains(stream_key(seed, realization, source_user_stream(u)),
               geometry.average_gain(distance(geometry.source, pos)),
               geometry.num_taps, K, g_su.data() + u * K);
    link_gains(stream_key(seed, realization, relay_user_stream(u)),
               geometry.average_gain(distance(geometry.relay, pos)),
               geometry.num_taps, K, g_ru.data() + u * K);
  }
  return ChannelRealization(K, U, std::move(g_sr), std::move(g_su), std::move(g_ru));
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

SolverSettings ExperimentConfig::solver_for(double snr_db) const {
  SolverSettings s = SolverSettings::for_budget(db_to_linear(snr_db), epsilon_rel);
  s.max_bisection_iters = max_bisection_iters;
  s.bracket_growth = bracket_growth;
  return s;
}

void ExperimentConfig::validate() const {
  geometry.validate();
  if (subcarrier_counts.empty())
    throw std::invalid_argument("experiment: no subcarrier counts");
  for (auto k : subcarrier_counts)
    if (k == 0) throw std::invalid_argument("experiment: K must be >= 1");
  if (num_users == 0) throw std::invalid_argument("experiment: U must be >= 1");
  if (snr_budget_db.empty()) throw std::invalid_argument("experiment: no budgets");
  for (double db : snr_budget_db)
    if (!std::isfinite(db)) throw std::invalid_argument("experiment: budget must be finite");
  if (num_realizations == 0)
    throw std::invalid_argument("experiment: realizations must be >= 1");
  if (protocols.empty()) throw std::invalid_argument("experiment: empty protocol set");
  if (!(epsilon_rel > 0.0) || !(epsilon_rel < 1.0))
    throw std::invalid_argument("experiment: epsilon_rel must be in (0, 1)");
  for (double db : snr_budget_db) solver_for(db).validate();
}

ExperimentReport run_experiment(
    const ExperimentConfig& config, unsigned workers,
    const std::function<void(const CellResult&)>& on_cell) {
  config.validate();
  workers = std::max(1u, workers);
  const std::size_t R = config.num_realizations;
  const std::size_t B = config.snr_budget_db.size();
  const std::size_t P = config.protocols.size();
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();

  ExperimentReport report;
  for (const std::size_t K : config.subcarrier_counts) {
    // rates[(b * P + p) * R + i]
    std::vector<double> rates(B * P * R, nan);
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);

    auto work = [&](unsigned w) {
      try {
        for (std::size_t i = next++; i < R; i = next++) {
          const ChannelRealization ch =
              generate_realization(config.geometry, K, config.num_users, config.seed, i);
          for (std::size_t b = 0; b < B; ++b) {
            const SolverSettings settings = config.solver_for(config.snr_budget_db[b]);
            for (std::size_t p = 0; p < P; ++p) {
              try {
                rates[(b * P + p) * R + i] = solve(ch, config.protocols[p], settings).sum_rate;
              } catch (const NonConvergenceError&) {
                // left as NaN and counted
              }
            }
          }
        }
      } catch (...) {
        errors[w] = std::current_exception();
        next = R;
      }
    };
    if (workers == 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);

    const auto bench = std::find(config.protocols.begin(), config.protocols.end(),
                                 ProtocolKind::Benchmark);
    for (std::size_t b = 0; b < B; ++b) {
      for (std::size_t p = 0; p < P; ++p) {
        CellResult cell;
        cell.num_subcarriers = K;
        cell.snr_db = config.snr_budget_db[b];
        cell.protocol = config.protocols[p];
        cell.rates.assign(rates.begin() + static_cast<std::ptrdiff_t>((b * P + p) * R),
                          rates.begin() + static_cast<std::ptrdiff_t>((b * P + p + 1) * R));
        const Stats rs = summarize(cell.rates);
        cell.mean_rate = rs.mean;
        cell.stderr_rate = rs.stderr_;
        cell.realizations = rs.n;
        cell.nonconverged = R - rs.n;

        std::vector<double> ratios(R, nan);
        if (bench != config.protocols.end()) {
          const auto bp = static_cast<std::size_t>(bench - config.protocols.begin());
          for (std::size_t i = 0; i < R; ++i) {
            const double num = cell.rates[i];
            const double den = rates[(b * P + bp) * R + i];
            if (std::isfinite(num) && std::isfinite(den) && den > 0.0) ratios[i] = num / den;
          }
        }
        const Stats qs = summarize(ratios);
        cell.mean_ratio = qs.mean;
        cell.stderr_ratio = qs.stderr_;
        if (on_cell) on_cell(cell);
        report.cells.push_back(std::move(cell));
      }
    }
  }
  return report;
}

}  // namespace sprelay
