#include "dmnls/config.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "dmnls/error.hpp"

namespace dmnls {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  std::ostringstream msg;
  msg << "config: invalid value '" << value << "' for key '" << key << "'";
  fail(ErrorCode::Config, msg.str());
}

double parse_double(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) bad_value(key, value);
  return out;
}

std::uint64_t parse_uint(std::string_view key, std::string_view value) {
  std::uint64_t out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) bad_value(key, value);
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(key, value);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct KeyHandler {
  std::function<void(RunConfig&, std::string_view, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T>
KeyHandler number(T RunConfig::*member) {
  return {[member](RunConfig& c, std::string_view k, std::string_view v) {
            if constexpr (std::is_floating_point_v<T>) {
              c.*member = parse_double(k, v);
            } else {
              c.*member = static_cast<T>(parse_uint(k, v));
            }
          },
          [member](const RunConfig& c) {
            if constexpr (std::is_floating_point_v<T>) {
              return fmt(c.*member);
            } else {
              return std::to_string(c.*member);
            }
          }};
}

KeyHandler boolean(bool RunConfig::*member) {
  return {[member](RunConfig& c, std::string_view k, std::string_view v) { c.*member = parse_bool(k, v); },
          [member](const RunConfig& c) { return std::string(c.*member ? "true" : "false"); }};
}

const std::map<std::string, KeyHandler, std::less<>>& table() {
  static const std::map<std::string, KeyHandler, std::less<>> t = {
      {"gamma_plus", number(&RunConfig::gamma_plus)},
      {"gamma_minus", number(&RunConfig::gamma_minus)},
      {"dispersion",
       {[](RunConfig& c, std::string_view k, std::string_view v) {
          if (v == "managed") c.constant_dispersion = false;
          else if (v == "constant") c.constant_dispersion = true;
          else bad_value(k, v);
        },
        [](const RunConfig& c) { return std::string(c.constant_dispersion ? "constant" : "managed"); }}},
      {"family",
       {[](RunConfig& c, std::string_view k, std::string_view v) {
          if (v == "gaussian") c.family = DataFamily::Gaussian;
          else if (v == "chirped_gaussian") c.family = DataFamily::ChirpedGaussian;
          else if (v == "double_bump") c.family = DataFamily::DoubleBump;
          else if (v == "random") c.family = DataFamily::Random;
          else bad_value(k, v);
        },
        [](const RunConfig& c) { return std::string(to_string(c.family)); }}},
      {"epsilon", number(&RunConfig::epsilon)},
      {"chirp", number(&RunConfig::chirp)},
      {"separation", number(&RunConfig::separation)},
      {"seed", number(&RunConfig::seed)},
      {"half_width", number(&RunConfig::half_width)},
      {"grid_size", number(&RunConfig::grid_size)},
      {"dt", number(&RunConfig::dt)},
      {"t_max", number(&RunConfig::t_max)},
      {"obs_interval", number(&RunConfig::obs_interval)},
      {"delta", number(&RunConfig::delta)},
      {"nonlinearity", number(&RunConfig::nonlinearity)},
      {"dealias", boolean(&RunConfig::dealias)},
      {"solver",
       {[](RunConfig& c, std::string_view k, std::string_view v) {
          if (v == "dmnls") c.solver = SolverKind::Dmnls;
          else if (v == "standard") c.solver = SolverKind::Standard;
          else if (v == "gt") c.solver = SolverKind::Gt;
          else bad_value(k, v);
        },
        [](const RunConfig& c) { return std::string(to_string(c.solver)); }}},
      {"gt_nodes",
       {[](RunConfig& c, std::string_view k, std::string_view v) {
          c.gt_nodes = static_cast<int>(parse_uint(k, v));
        },
        [](const RunConfig& c) { return std::to_string(c.gt_nodes); }}},
      {"window_start", number(&RunConfig::window_start)},
      {"window_end", number(&RunConfig::window_end)},
      {"profile_points", number(&RunConfig::profile_points)},
      {"fit_t_min", number(&RunConfig::fit_t_min)},
      {"checkpoints",
       {[](RunConfig& c, std::string_view k, std::string_view v) {
          std::vector<double> out;
          std::string_view rest = v;
          while (!rest.empty()) {
            const auto comma = rest.find(',');
            const auto item = trim(rest.substr(0, comma));
            if (item.empty()) bad_value(k, v);
            out.push_back(parse_double(k, item));
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
          }
          c.checkpoints = std::move(out);
        },
        [](const RunConfig& c) {
          std::string s;
          for (std::size_t i = 0; i < c.checkpoints.size(); ++i) {
            if (i) s += ",";
            s += fmt(c.checkpoints[i]);
          }
          return s;
        }}},
      {"output_dir",
       {[](RunConfig& c, std::string_view, std::string_view v) { c.output_dir = std::string(v); },
        [](const RunConfig& c) { return c.output_dir; }}},
      {"snapshots", boolean(&RunConfig::write_snapshots)},
  };
  return t;
}

}  // namespace

std::string_view to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::Dmnls: return "dmnls";
    case SolverKind::Standard: return "standard";
    case SolverKind::Gt: return "gt";
  }
  return "?";
}

std::string_view to_string(DataFamily family) {
  switch (family) {
    case DataFamily::Gaussian: return "gaussian";
    case DataFamily::ChirpedGaussian: return "chirped_gaussian";
    case DataFamily::DoubleBump: return "double_bump";
    case DataFamily::Random: return "random";
  }
  return "?";
}

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> k = [] {
    std::vector<std::string> out;
    for (const auto& [name, _] : table()) out.push_back(name);
    return out;
  }();
  return k;
}

void RunConfig::set(std::string_view key, std::string_view value) {
  const auto it = table().find(key);
  if (it == table().end()) {
    std::ostringstream msg;
    msg << "config: unknown key '" << key << "'";
    fail(ErrorCode::Config, msg.str());
  }
  it->second.set(*this, key, trim(value));
}

std::string RunConfig::get(std::string_view key) const {
  const auto it = table().find(key);
  if (it == table().end()) {
    std::ostringstream msg;
    msg << "config: unknown key '" << key << "'";
    fail(ErrorCode::Config, msg.str());
  }
  return it->second.get(*this);
}

RunConfig RunConfig::parse(std::string_view text) {
  RunConfig config;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      std::ostringstream msg;
      msg << "config: line " << line_no << ": expected 'key = value'";
      fail(ErrorCode::Config, msg.str());
    }
    const auto key = trim(line.substr(0, eq));
    if (!seen.insert(std::string(key)).second) {
      std::ostringstream msg;
      msg << "config: line " << line_no << ": duplicate key '" << key << "'";
      fail(ErrorCode::Config, msg.str());
    }
    config.set(key, line.substr(eq + 1));
  }
  return config;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "config: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string RunConfig::to_text() const {
  std::string out;
  for (const auto& [name, f] : table()) out += name + " = " + f.get(*this) + "\n";
  return out;
}

void RunConfig::validate() const {
  auto check = [](bool ok, const std::string& what) {
    if (!ok) fail(ErrorCode::Config, "config: " + what);
  };
  try {
    (void)map();
    (void)grid();
  } catch (const Error& e) {
    fail(ErrorCode::Config, std::string("config: ") + e.what());
  }
  check(epsilon >= 0.0, "epsilon must be nonnegative");
  check(dt > 0.0 && dt <= 0.25, "dt must lie in (0, 1/4]");
  check(t_max > map().threshold_T0(), "t_max must exceed T0 of the dispersion map");
  check(obs_interval > 0.0, "obs_interval must be positive");
  check(delta >= 0.0, "delta must be nonnegative");
  check(gt_nodes >= 2, "gt_nodes must be >= 2");
  check(profile_points >= 16 && std::has_single_bit(profile_points) && profile_points <= grid_size,
        "profile_points must be a power of two in [16, grid_size]");
  check(window_end > window_start, "extraction window must be nonempty");
  check(window_end <= t_max, "extraction window must end by t_max");
  check(fit_t_min > 0.0, "fit_t_min must be positive");
  check(!output_dir.empty(), "output_dir must be set");
}

StepControl RunConfig::step_control() const {
  StepControl c;
  c.dt = dt;
  c.dealias = dealias;
  c.nonlinearity = nonlinearity;
  c.observe_every = obs_interval;
  return c;
}

}  // namespace dmnls
