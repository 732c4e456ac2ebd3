#include "sprelay/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace sprelay {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw ParseError("line " + std::to_string(line) + ": " + msg);
}

std::optional<double> to_double(const std::string& tok) {
  double v = 0.0;
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return v;
}

std::optional<std::uint64_t> to_uint(const std::string& tok) {
  std::uint64_t v = 0;
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

// Non-blank, non-comment lines with their 1-based line numbers.
struct Line {
  std::size_t number;
  std::string text;
};

std::vector<Line> content_lines(std::istream& in) {
  std::vector<Line> out;
  std::string raw;
  std::size_t n = 0;
  while (std::getline(in, raw)) {
    ++n;
    std::string t = trim(raw);
    if (t.empty() || t.front() == '#') continue;
    out.push_back({n, std::move(t)});
  }
  return out;
}

std::vector<double> parse_row(const Line& line, std::size_t expected) {
  std::istringstream is(line.text);
  std::vector<double> row;
  std::string tok;
  while (is >> tok) {
    auto v = to_double(tok);
    if (!v) fail(line.number, "not a number: '" + tok + "'");
    if (!std::isfinite(*v) || *v < 0.0)
      fail(line.number, "gain must be finite and >= 0: '" + tok + "'");
    row.push_back(*v);
  }
  if (row.size() != expected)
    fail(line.number, "expected " + std::to_string(expected) + " values, found " +
                          std::to_string(row.size()));
  return row;
}

std::size_t parse_header_count(const Line& line, const std::string& key) {
  std::istringstream is(line.text);
  std::string name, value, extra;
  is >> name >> value;
  if (name != key || (is >> extra))
    fail(line.number, "expected '" + key + " <count>'");
  auto v = to_uint(value);
  if (!v || *v == 0) fail(line.number, key + " must be a positive integer");
  return static_cast<std::size_t>(*v);
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  (void)ec;
  return std::string(buf, ptr);
}

ProtocolKind parse_protocol(const std::string& name) {
  if (name == "novel") return ProtocolKind::Novel;
  if (name == "benchmark") return ProtocolKind::Benchmark;
  throw ParseError("unknown protocol '" + name + "'");
}

std::vector<ProtocolKind> parse_protocol_set(const std::string& name) {
  if (name == "both") return {ProtocolKind::Novel, ProtocolKind::Benchmark};
  return {parse_protocol(name)};
}

ChannelRealization read_channel(std::istream& in) {
  const auto lines = content_lines(in);
  std::size_t i = 0;
  auto next = [&](const char* what) -> const Line& {
    if (i >= lines.size())
      throw ParseError("unexpected end of file, expected " + std::string(what));
    return lines[i++];
  };
  const std::size_t K = parse_header_count(next("'K <count>'"), "K");
  const std::size_t U = parse_header_count(next("'U <count>'"), "U");

  auto block = [&](const char* label, std::size_t rows) {
    const Line& head = next(label);
    if (head.text != label)
      fail(head.number, "expected block label '" + std::string(label) + "'");
    std::vector<double> values;
    for (std::size_t r = 0; r < rows; ++r) {
      auto row = parse_row(next("a row of gains"), K);
      values.insert(values.end(), row.begin(), row.end());
    }
    return values;
  };
  auto g_sr = block("g_sr", 1);
  auto g_su = block("g_su", U);
  auto g_ru = block("g_ru", U);
  if (i < lines.size()) fail(lines[i].number, "unexpected trailing content");
  return ChannelRealization(K, U, std::move(g_sr), std::move(g_su), std::move(g_ru));
}

ChannelRealization read_channel_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open channel file '" + path + "'");
  return read_channel(in);
}

void write_channel(std::ostream& out, const ChannelRealization& ch) {
  const auto K = ch.num_subcarriers();
  auto row = [&](std::span<const double> v) {
    for (std::size_t k = 0; k < v.size(); ++k)
      out << (k ? " " : "") << format_double(v[k]);
    out << '\n';
  };
  out << "K " << K << "\nU " << ch.num_users() << "\ng_sr\n";
  row(ch.g_sr());
  out << "g_su\n";
  for (std::size_t u = 0; u < ch.num_users(); ++u) row(ch.g_su().subspan(u * K, K));
  out << "g_ru\n";
  for (std::size_t u = 0; u < ch.num_users(); ++u) row(ch.g_ru().subspan(u * K, K));
}

ExperimentConfig read_config(std::istream& in) {
  ExperimentConfig cfg;
  bool reference_gain_set = false;
  std::map<std::string, std::size_t> seen;

  for (const Line& line : content_lines(in)) {
    const auto eq = line.text.find('=');
    if (eq == std::string::npos) fail(line.number, "expected 'key = value'");
    const std::string key = trim(line.text.substr(0, eq));
    const std::string value = trim(line.text.substr(eq + 1));
    if (key.rfind("run.", 0) == 0) continue;
    if (!seen.emplace(key, line.number).second) fail(line.number, "duplicate key '" + key + "'");
    if (value.empty()) fail(line.number, "empty value for '" + key + "'");

    auto num = [&]() {
      auto v = to_double(value);
      if (!v || !std::isfinite(*v)) fail(line.number, "'" + key + "' needs a finite number");
      return *v;
    };
    auto count = [&]() {
      auto v = to_uint(value);
      if (!v) fail(line.number, "'" + key + "' needs a nonnegative integer");
      return *v;
    };

    auto& g = cfg.geometry;
    if (key == "geometry.source_x") g.source.x = num();
    else if (key == "geometry.source_y") g.source.y = num();
    else if (key == "geometry.relay_x") g.relay.x = num();
    else if (key == "geometry.relay_y") g.relay.y = num();
    else if (key == "geometry.region_x") g.region_center.x = num();
    else if (key == "geometry.region_y") g.region_center.y = num();
    else if (key == "geometry.region_radius") g.region_radius = num();
    else if (key == "geometry.path_loss_exponent") g.path_loss_exponent = num();
    else if (key == "geometry.num_taps") g.num_taps = static_cast<int>(count());
    else if (key == "geometry.reference_gain") {
      g.reference_gain = num();
      reference_gain_set = true;
    } else if (key == "experiment.subcarriers") {
      cfg.subcarrier_counts.clear();
      for (const auto& tok : split(value, ',')) {
        auto v = to_uint(tok);
        if (!v || *v == 0) fail(line.number, "subcarrier counts must be positive integers");
        cfg.subcarrier_counts.push_back(static_cast<std::size_t>(*v));
      }
    } else if (key == "experiment.users") cfg.num_users = count();
    else if (key == "experiment.snr_db") {
      cfg.snr_budget_db.clear();
      for (const auto& tok : split(value, ',')) {
        auto v = to_double(tok);
        if (!v || !std::isfinite(*v)) fail(line.number, "snr_db entries must be numbers");
        cfg.snr_budget_db.push_back(*v);
      }
    } else if (key == "experiment.realizations") cfg.num_realizations = count();
    else if (key == "experiment.protocols") {
      cfg.protocols.clear();
      for (const auto& tok : split(value, ',')) {
        try {
          for (auto p : parse_protocol_set(tok)) cfg.protocols.push_back(p);
        } catch (const ParseError& e) {
          fail(line.number, e.what());
        }
      }
    } else if (key == "experiment.seed") cfg.seed = count();
    else if (key == "solver.epsilon_rel") cfg.epsilon_rel = num();
    else if (key == "solver.max_bisection_iters") cfg.max_bisection_iters = static_cast<int>(count());
    else if (key == "solver.bracket_growth") cfg.bracket_growth = num();
    else fail(line.number, "unknown key '" + key + "'");
  }
  if (!reference_gain_set) cfg.geometry.reference_gain = unit_gain_at_center(cfg.geometry);
  return cfg;
}

ExperimentConfig read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'");
  return read_config(in);
}

void write_config(std::ostream& out, const ExperimentConfig& cfg) {
  const auto& g = cfg.geometry;
  auto list = [](const auto& xs, auto fmt) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + fmt(xs[i]);
    return s;
  };
  out << "geometry.source_x = " << format_double(g.source.x) << '\n'
      << "geometry.source_y = " << format_double(g.source.y) << '\n'
      << "geometry.relay_x = " << format_double(g.relay.x) << '\n'
      << "geometry.relay_y = " << format_double(g.relay.y) << '\n'
      << "geometry.region_x = " << format_double(g.region_center.x) << '\n'
      << "geometry.region_y = " << format_double(g.region_center.y) << '\n'
      << "geometry.region_radius = " << format_double(g.region_radius) << '\n'
      << "geometry.path_loss_exponent = " << format_double(g.path_loss_exponent) << '\n'
      << "geometry.num_taps = " << g.num_taps << '\n'
      << "geometry.reference_gain = " << format_double(g.reference_gain) << '\n'
      << "experiment.subcarriers = "
      << list(cfg.subcarrier_counts, [](std::size_t k) { return std::to_string(k); }) << '\n'
      << "experiment.users = " << cfg.num_users << '\n'
      << "experiment.snr_db = " << list(cfg.snr_budget_db, format_double) << '\n'
      << "experiment.realizations = " << cfg.num_realizations << '\n'
      << "experiment.protocols = "
      << list(cfg.protocols, [](ProtocolKind p) { return std::string(to_string(p)); }) << '\n'
      << "experiment.seed = " << cfg.seed << '\n'
      << "solver.epsilon_rel = " << format_double(cfg.epsilon_rel) << '\n'
      << "solver.max_bisection_iters = " << cfg.max_bisection_iters << '\n'
      << "solver.bracket_growth = " << format_double(cfg.bracket_growth) << '\n';
}

void write_csv_row(std::ostream& out, const CellResult& c) {
  out << c.num_subcarriers << ',' << format_double(c.snr_db) << ',' << to_string(c.protocol)
      << ',' << format_double(c.mean_rate) << ',' << format_double(c.stderr_rate) << ','
      << format_double(c.mean_ratio) << ',' << format_double(c.stderr_ratio) << ','
      << c.realizations << ',' << c.nonconverged << '\n';
}

std::vector<CellResult> read_csv(std::istream& in) {
  std::vector<CellResult> cells;
  std::string raw;
  std::size_t n = 0;
  if (!std::getline(in, raw) || trim(raw) != kCsvHeader) throw ParseError("line 1: bad CSV header");
  ++n;
  while (std::getline(in, raw)) {
    ++n;
    if (trim(raw).empty()) continue;
    const auto f = split(trim(raw), ',');
    if (f.size() != 9) fail(n, "expected 9 fields");
    auto d = [&](const std::string& s) {
      auto v = to_double(s);
      if (!v) fail(n, "not a number: '" + s + "'");
      return *v;
    };
    auto u = [&](const std::string& s) {
      auto v = to_uint(s);
      if (!v) fail(n, "not a count: '" + s + "'");
      return static_cast<std::size_t>(*v);
    };
    CellResult c;
    c.num_subcarriers = u(f[0]);
    c.snr_db = d(f[1]);
    try {
      c.protocol = parse_protocol(f[2]);
    } catch (const ParseError& e) {
      fail(n, e.what());
    }
    c.mean_rate = d(f[3]);
    c.stderr_rate = d(f[4]);
    c.mean_ratio = d(f[5]);
    c.stderr_ratio = d(f[6]);
    c.realizations = u(f[7]);
    c.nonconverged = u(f[8]);
    cells.push_back(std::move(c));
  }
  return cells;
}

}  // namespace sprelay
