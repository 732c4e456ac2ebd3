#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "sprelay/io.hpp"
#include "test_channels.hpp"

using namespace sprelay;

namespace {

std::string error_of(const std::string& text) {
  std::istringstream in(text);
  try {
    read_channel(in);
  } catch (const ParseError& e) {
    return e.what();
  }
  return {};
}

std::string config_error_of(const std::string& text) {
  std::istringstream in(text);
  try {
    read_config(in);
  } catch (const ParseError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("format_double round trips") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-30, 30);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::pow(10.0, u(rng));
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(NAN) == "nan");
  CHECK(format_double(2.0) == "2");
}

TEST_CASE("channel file round trip") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 20; ++t) {
    const auto ch = random_channel(1 + t % 7, 1 + t % 4, rng);
    std::stringstream s;
    write_channel(s, ch);
    CHECK(read_channel(s) == ch);
  }
}

TEST_CASE("channel file with comments and blank lines") {
  std::istringstream in(
      "# two subcarriers\nK 2\n\nU 1\ng_sr\n1 2\n# direct\ng_su\n0.5 0\ng_ru\n3 4\n");
  const auto ch = read_channel(in);
  CHECK(ch.num_subcarriers() == 2);
  CHECK(ch.sr(1) == 2.0);
  CHECK(ch.su(0, 0) == 0.5);
  CHECK(ch.ru(0, 1) == 4.0);
}

TEST_CASE("malformed channel files name the line") {
  CHECK(error_of("K 2\nU 1\ng_sr\n1 2\ng_su\n1 x\ng_ru\n1 1\n").rfind("line 6:", 0) == 0);
  CHECK(error_of("K 2\nU 1\ng_sr\n1 2 3\n").rfind("line 4:", 0) == 0);
  CHECK(error_of("K 2\nU 1\ng_sr\n1 -2\n").rfind("line 4:", 0) == 0);
  CHECK(error_of("K 2\nU 1\ng_su\n").rfind("line 3:", 0) == 0);
  CHECK(error_of("K 1\nU 1\ng_sr\n1\ng_su\n1\ng_ru\n1\nextra\n").rfind("line 9:", 0) == 0);
  CHECK(error_of("K two\n").rfind("line 1:", 0) == 0);
  CHECK(error_of("K 1\nU 1\ng_sr\n1\n").find("end of file") != std::string::npos);
  CHECK_THROWS_AS(read_channel_file("/nonexistent/channel.txt"), ParseError);
}

TEST_CASE("config parsing") {
  std::istringstream in(
      "# small run\n"
      "experiment.subcarriers = 4, 8\n"
      "experiment.users = 2\n"
      "experiment.snr_db = 10,20.5\n"
      "experiment.realizations = 7\n"
      "experiment.protocols = novel\n"
      "experiment.seed = 42\n"
      "geometry.num_taps = 2\n"
      "solver.epsilon_rel = 1e-5\n");
  const auto c = read_config(in);
  CHECK(c.subcarrier_counts == std::vector<std::size_t>{4, 8});
  CHECK(c.num_users == 2);
  CHECK(c.snr_budget_db == std::vector<double>{10, 20.5});
  CHECK(c.num_realizations == 7);
  CHECK(c.protocols == std::vector<ProtocolKind>{ProtocolKind::Novel});
  CHECK(c.seed == 42);
  CHECK(c.geometry.num_taps == 2);
  CHECK(c.epsilon_rel == 1e-5);
  CHECK(c.geometry.reference_gain == doctest::Approx(1e6).epsilon(1e-14));
}

TEST_CASE("reference gain follows the geometry when absent") {
  std::istringstream in("geometry.region_x = 10\n");
  const auto c = read_config(in);
  CHECK(c.geometry.average_gain(10.0) == doctest::Approx(1.0).epsilon(1e-14));
  std::istringstream in2("geometry.reference_gain = 5\n");
  CHECK(read_config(in2).geometry.reference_gain == 5.0);
}

TEST_CASE("config errors name the line") {
  CHECK(config_error_of("experiment.users = 2\nbogus = 1\n").rfind("line 2:", 0) == 0);
  CHECK(config_error_of("experiment.users = 2\n\nexperiment.users = 3\n").rfind("line 3:", 0) ==
        0);
  CHECK(config_error_of("experiment.users = \n").rfind("line 1:", 0) == 0);
  CHECK(config_error_of("experiment.users 2\n").rfind("line 1:", 0) == 0);
  CHECK(config_error_of("experiment.protocols = novel,other\n").rfind("line 1:", 0) == 0);
  CHECK(config_error_of("experiment.subcarriers = 0\n").rfind("line 1:", 0) == 0);
  CHECK(config_error_of("solver.epsilon_rel = nan\n").rfind("line 1:", 0) == 0);
}

TEST_CASE("written config reads back identically") {
  ExperimentConfig c;
  c.subcarrier_counts = {4, 16, 64};
  c.snr_budget_db = {15.5, 20};
  c.protocols = {ProtocolKind::Benchmark};
  c.seed = 123456789012345ULL;
  c.geometry.reference_gain = 3.14159;
  c.epsilon_rel = 2.5e-7;
  std::stringstream s;
  write_config(s, c);
  s << "run.version = 1.0.0\nrun.timestamp = now\n";
  const auto r = read_config(s);
  CHECK(r.subcarrier_counts == c.subcarrier_counts);
  CHECK(r.snr_budget_db == c.snr_budget_db);
  CHECK(r.protocols == c.protocols);
  CHECK(r.seed == c.seed);
  CHECK(r.geometry.reference_gain == c.geometry.reference_gain);
  CHECK(r.geometry.region_radius == c.geometry.region_radius);
  CHECK(r.epsilon_rel == c.epsilon_rel);
  CHECK(r.max_bisection_iters == c.max_bisection_iters);
  CHECK(r.num_realizations == c.num_realizations);
}

TEST_CASE("results CSV round trip") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0, 50);
  std::vector<CellResult> cells;
  for (int i = 0; i < 10; ++i) {
    CellResult c;
    c.num_subcarriers = 4u << i;
    c.snr_db = u(rng);
    c.protocol = i % 2 ? ProtocolKind::Benchmark : ProtocolKind::Novel;
    c.mean_rate = u(rng);
    c.stderr_rate = u(rng) / 1000;
    c.mean_ratio = i == 3 ? NAN : 1 + u(rng) / 1e4;
    c.stderr_ratio = i == 3 ? NAN : u(rng) / 1e6;
    c.realizations = 100 + i;
    c.nonconverged = i;
    cells.push_back(c);
  }
  std::stringstream s;
  s << kCsvHeader << '\n';
  for (const auto& c : cells) write_csv_row(s, c);
  const auto back = read_csv(s);
  REQUIRE(back.size() == cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    CHECK(back[i].num_subcarriers == cells[i].num_subcarriers);
    CHECK(back[i].snr_db == cells[i].snr_db);
    CHECK(back[i].protocol == cells[i].protocol);
    CHECK(back[i].mean_rate == cells[i].mean_rate);
    CHECK(back[i].stderr_rate == cells[i].stderr_rate);
    if (i == 3) {
      CHECK(std::isnan(back[i].mean_ratio));
    } else {
      CHECK(back[i].mean_ratio == cells[i].mean_ratio);
    }
    CHECK(back[i].realizations == cells[i].realizations);
    CHECK(back[i].nonconverged == cells[i].nonconverged);
  }
}

TEST_CASE("CSV reader rejects a bad header") {
  std::istringstream in("K,rate\n");
  CHECK_THROWS_AS(read_csv(in), ParseError);
}

TEST_CASE("protocol names") {
  CHECK(parse_protocol("novel") == ProtocolKind::Novel);
  CHECK(parse_protocol_set("both").size() == 2);
  CHECK_THROWS_AS(parse_protocol("Novel"), ParseError);
}
