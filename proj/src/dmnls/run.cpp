#include "dmnls/run.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>

#include "dmnls/io.hpp"
#include "dmnls/solver.hpp"

namespace dmnls {

using std::numbers::pi;
namespace fs = std::filesystem;

std::uint64_t Rng::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double sigma_norm(const Field& f) {
  Field xf(f.grid, f.time);
  for (std::size_t j = 0; j < f.size(); ++j) xf.values[j] = f.grid.x(j) * f.values[j];
  return f.l2_norm() + gradient_norm(f) + xf.l2_norm();
}

Field random_smooth_field(const Grid& grid, Rng& rng) {
  struct Bump {
    double center, width, amp, phase, chirp, drift;
  };
  std::vector<Bump> bumps(3);
  for (auto& b : bumps) {
    b = {rng.uniform(-3.0, 3.0), rng.uniform(0.7, 1.6), rng.uniform(0.3, 1.0),
         rng.uniform(0.0, 2.0 * pi), rng.uniform(-0.2, 0.2), rng.uniform(-1.0, 1.0)};
  }
  return Field::sample(grid, 0.0, [&](double x) {
    cplx sum = 0.0;
    for (const auto& b : bumps) {
      const double y = (x - b.center) / b.width;
      sum += b.amp * std::exp(-0.5 * y * y) *
             std::polar(1.0, b.phase + b.drift * x + b.chirp * (x - b.center) * (x - b.center));
    }
    return sum;
  });
}

Field initial_data(const RunConfig& config) {
  const Grid grid = config.grid();
  const double norm = std::pow(pi, -0.25);
  Field f(grid, 0.0);
  switch (config.family) {
    case DataFamily::Gaussian:
      f = Field::sample(grid, 0.0, [&](double x) { return cplx(norm * std::exp(-0.5 * x * x)); });
      break;
    case DataFamily::ChirpedGaussian:
      f = Field::sample(grid, 0.0, [&](double x) {
        return norm * std::exp(-0.5 * x * x) * std::polar(1.0, config.chirp * x * x);
      });
      break;
    case DataFamily::DoubleBump: {
      const double s = 0.5 * config.separation;
      f = Field::sample(grid, 0.0, [&](double x) {
        return cplx(norm * (std::exp(-0.5 * (x - s) * (x - s)) + std::exp(-0.5 * (x + s) * (x + s))));
      });
      break;
    }
    case DataFamily::Random: {
      Rng rng(config.seed);
      f = random_smooth_field(grid, rng);
      break;
    }
  }
  const double sigma = sigma_norm(f);
  const double scale = config.epsilon == 0.0 ? 0.0 : config.epsilon / sigma;
  for (auto& z : f.values) z *= scale;
  return f;
}

DispersionSchedule dynamics_schedule(const RunConfig& config) {
  const DispersionMap map = config.map();
  if (config.solver == SolverKind::Standard || config.constant_dispersion) {
    return DispersionSchedule::constant(map.average());
  }
  return map;
}

DispersionSchedule frame_schedule(const RunConfig& config) {
  if (config.solver == SolverKind::Dmnls) return dynamics_schedule(config);
  return DispersionSchedule::constant(config.map().average());
}

namespace {

bool near(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

}  // namespace

std::optional<PowerFit> decay_fit(const NormSeries& series, double t_min, double t_max) {
  std::vector<double> t;
  std::vector<double> y;
  for (const auto& s : series.samples()) {
    if (s.t < t_min || s.t > t_max) continue;
    if (!(s.sup > 0.0)) return std::nullopt;
    t.push_back(s.t);
    y.push_back(s.sup);
  }
  if (t.size() < 10) return std::nullopt;
  return fit_power_law(t, y, t_min, t_max);
}

RunResult run_simulation(const RunConfig& config) {
  config.validate();
  RunResult result;
  result.config = config;
  result.norms = NormSeries(config.delta);

  const DispersionMap map = config.map();
  const double T0 = map.threshold_T0();
  const DispersionSchedule dynamics = dynamics_schedule(config);
  const DispersionSchedule frame = frame_schedule(config);
  const Field u0 = initial_data(config);
  result.tracker = std::make_unique<ScatteringTracker>(u0.grid, frame, T0, config.profile_points);

  std::vector<double> dyadic;
  for (double t = T0; t <= config.t_max * (1.0 + 1e-12); t *= 2.0) dyadic.push_back(t);

  auto observer = [&](const Field& u) {
    record_norms(u, result.norms, frame);
    result.tracker->observe(u);
    for (double t : dyadic) {
      if (near(u.time, t)) result.dyadic_snapshots.push_back(u);
    }
    for (double t : config.checkpoints) {
      if (near(u.time, t)) result.checkpoint_fields.push_back(u);
    }
    result.final_field = u;
  };

  const StepControl control = config.step_control();
  try {
    EvolveResult evolved = config.solver == SolverKind::Gt
                               ? evolve_gt(u0, config.t_max, control, dynamics, config.gt_nodes, observer)
                               : evolve(u0, config.t_max, control, dynamics, observer);
    result.mass_drift = evolved.mass_drift;
    result.step_count = evolved.step_count;
    result.final_field = std::move(evolved.field);
  } catch (const Error& e) {
    result.truncated = true;
    result.error_code = e.code();
    result.error = e.what();
  }

  const auto& entries = result.tracker->entries();
  if (!entries.empty() && entries.back().t >= config.window_end * (1.0 - 1e-12)) {
    try {
      result.profile = extract_profile(*result.tracker, config.window_start, config.window_end);
    } catch (const Error& e) {
      if (!result.error_code) {
        result.error_code = e.code();
        result.error = e.what();
      }
    }
  }

  if (result.profile) {
    for (const Field& u : result.checkpoint_fields) {
      if (u.time < T0) continue;
      for (const auto& e : entries) {
        if (!near(e.t, u.time)) continue;
        ResidualPoint p;
        p.t = u.time;
        p.w_residual = profile_residual(e.w, *result.profile, u.time);
        p.u_residual = residual(u, *result.profile, frame);
        result.residuals.push_back(p);
      }
    }
  }
  return result;
}

nlohmann::json profile_meta(const RunResult& r) {
  const auto& c = r.config;
  return {{"map", {{"gamma_plus", c.gamma_plus}, {"gamma_minus", c.gamma_minus}}},
          {"dispersion", c.constant_dispersion ? "constant" : "managed"},
          {"solver", to_string(c.solver)},
          {"family", to_string(c.family)},
          {"epsilon", c.epsilon},
          {"delta", c.delta},
          {"truncated", r.truncated}};
}

nlohmann::json run_summary(const RunResult& r) {
  const auto& c = r.config;
  const DispersionMap map = c.map();
  nlohmann::json j;
  j["config"] = c.to_text();
  j["T0"] = map.threshold_T0();
  j["average_dispersion"] = map.average();
  j["truncated"] = r.truncated;
  if (r.error_code) {
    j["error"] = {{"code", static_cast<int>(*r.error_code)}, {"message", r.error}};
  }
  j["steps"] = r.step_count;
  j["observations"] = r.norms.size();
  j["mass_drift"] = r.mass_drift;
  if (!r.norms.empty()) {
    const auto b = bootstrap_norms(r.norms);
    j["bootstrap"] = {{"X", b.x}, {"S", b.s}};
  }
  const double t_end = r.norms.empty() ? 0.0 : r.norms.samples().back().t;
  if (auto fit = decay_fit(r.norms, c.fit_t_min, t_end)) {
    j["decay_fit"] = {{"slope", fit->slope}, {"intercept", fit->intercept}, {"r2", fit->r2},
                      {"samples", fit->samples}, {"t_min", c.fit_t_min}, {"t_max", t_end}};
  }
  if (r.profile) {
    double peak = 0.0;
    for (const auto& w : r.profile->W) peak = std::max(peak, std::abs(w));
    j["profile"] = {{"W_sup", peak}, {"drift", r.profile->drift},
                    {"window", {r.profile->window_start, r.profile->window_end}}};
  }
  nlohmann::json res = nlohmann::json::array();
  for (const auto& p : r.residuals) {
    res.push_back({{"t", p.t}, {"w_residual", p.w_residual}, {"u_residual", p.u_residual}});
  }
  j["residuals"] = res;
  return j;
}

void write_run_outputs(const RunResult& r, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create output directory '" + dir + "'");
  const fs::path root(dir);

  write_norms_csv((root / "norms.csv").string(), r.norms);
  if (r.profile) {
    write_text((root / "profile.json").string(), profile_to_json(*r.profile, profile_meta(r)).dump() + "\n");
  }
  std::string csv = "t,w_residual,u_residual\n";
  for (const auto& p : r.residuals) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.t, p.w_residual, p.u_residual);
    csv += buf;
  }
  write_text((root / "residuals.csv").string(), csv);
  write_text((root / "run.json").string(), run_summary(r).dump(2) + "\n");

  if (r.config.write_snapshots) {
    fs::create_directories(root / "snapshots", ec);
    if (ec) fail(ErrorCode::Io, "cannot create snapshot directory");
    for (const Field& u : r.dyadic_snapshots) {
      char name[64];
      std::snprintf(name, sizeof name, "field_t%010.4f.bin", u.time);
      write_snapshot((root / "snapshots" / name).string(), u);
    }
    if (r.final_field) write_snapshot((root / "snapshots" / "final.bin").string(), *r.final_field);
  }
}

IdentityReport verify_identities(std::uint64_t seed, std::size_t count, const DispersionMap& map) {
  const Grid grid(60.0, 4096);
  Rng rng(seed);
  IdentityReport report;
  for (std::size_t i = 0; i < count; ++i) {
    const Field f = random_smooth_field(grid, rng);

    const double a = rng.uniform(0.5, 2.0);
    const Field direct = free_propagate(f, a);
    const Field factored = mdfm_factorization(f, a);
    double err = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      err = std::max(err, std::abs(direct.values[j] - factored.values[j]));
    }
    report.factorization = std::max(report.factorization, err / direct.sup_norm());

    const double t0 = rng.uniform(0.0, 1.0);
    const double s = rng.uniform(0.0, 3.0);
    const double t = rng.uniform(0.0, 3.0);
    report.commutation = std::max(report.commutation, commutation_residual(f, t, s, t0, map));
    report.chain_rule = std::max(report.chain_rule, chain_rule_residual(f, t, t0, map));
    ++report.cases;
  }
  return report;
}

nlohmann::json to_json(const IdentityReport& r) {
  return {{"cases", r.cases},
          {"factorization", r.factorization},
          {"commutation", r.commutation},
          {"chain_rule", r.chain_rule}};
}

nlohmann::json compare_solvers(const RunConfig& config) {
  config.validate();
  std::vector<SolverKind> kinds;
  if (!config.constant_dispersion) kinds.push_back(SolverKind::Dmnls);
  kinds.push_back(SolverKind::Standard);
  kinds.push_back(SolverKind::Gt);

  nlohmann::json report;
  report["dmnls_enabled"] = !config.constant_dispersion;
  std::vector<std::pair<SolverKind, RunResult>> runs;
  for (SolverKind kind : kinds) {
    RunConfig c = config;
    c.solver = kind;
    c.write_snapshots = false;
    runs.emplace_back(kind, run_simulation(c));
  }

  nlohmann::json models = nlohmann::json::object();
  for (const auto& [kind, r] : runs) {
    nlohmann::json m;
    m["mass_drift"] = r.mass_drift;
    m["truncated"] = r.truncated;
    if (r.error_code) m["error"] = r.error;
    const double t_end = r.norms.empty() ? 0.0 : r.norms.samples().back().t;
    if (auto fit = decay_fit(r.norms, config.fit_t_min, t_end)) {
      m["decay_fit"] = {{"slope", fit->slope}, {"intercept", fit->intercept}, {"r2", fit->r2}};
    }
    if (r.profile) {
      std::vector<double> mod;
      for (const auto& w : r.profile->W) mod.push_back(std::abs(w));
      m["W_abs"] = mod;
    }
    models[std::string(to_string(kind))] = m;
  }
  report["models"] = models;

  // Pairwise sup distances between |W| profiles and between final fields.
  nlohmann::json pairs = nlohmann::json::object();
  for (std::size_t a = 0; a < runs.size(); ++a) {
    for (std::size_t b = a + 1; b < runs.size(); ++b) {
      const auto& ra = runs[a].second;
      const auto& rb = runs[b].second;
      nlohmann::json p;
      if (ra.profile && rb.profile) {
        double d = 0.0;
        for (std::size_t k = 0; k < ra.profile->W.size(); ++k) {
          d = std::max(d, std::abs(std::abs(ra.profile->W[k]) - std::abs(rb.profile->W[k])));
        }
        p["W_abs_sup_diff"] = d;
      }
      if (ra.final_field && rb.final_field && ra.final_field->time == rb.final_field->time) {
        double d = 0.0;
        for (std::size_t j = 0; j < ra.final_field->size(); ++j) {
          d = std::max(d, std::abs(ra.final_field->values[j] - rb.final_field->values[j]));
        }
        p["final_sup_diff"] = d;
      }
      pairs[std::string(to_string(runs[a].first)) + "_vs_" + std::string(to_string(runs[b].first))] = p;
    }
  }
  report["pairs"] = pairs;
  return report;
}

}  // namespace dmnls
