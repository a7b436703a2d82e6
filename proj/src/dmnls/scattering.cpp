#include "dmnls/scattering.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "dmnls/error.hpp"

namespace dmnls {

using std::numbers::pi;

Field to_profile_w(const Field& u, const DispersionSchedule& schedule) {
  const double t = u.time;
  if (const auto& map = schedule.map(); map && t < map->threshold_T0()) {
    std::ostringstream msg;
    msg << "to_profile_w: t=" << t << " precedes T0=" << map->threshold_T0();
    fail(ErrorCode::InvalidArgument, msg.str());
  }
  const double gamma = schedule.total(t, 0.0);
  if (!(gamma > 0.0)) fail(ErrorCode::InvalidArgument, "to_profile_w: total dispersion must be positive");

  Field v = free_propagate(u, -gamma);
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double x = v.grid.x(j);
    v.values[j] *= std::polar(1.0, x * x / (4.0 * gamma));
  }
  return forward_ft(v);
}

Field cut_low(const Field& w, double t) {
  require(t > 0.0, "cut_low: t must be positive");
  return project_low(w, std::sqrt(t));
}

Field decimate(const Field& f, std::size_t stride) {
  require(stride >= 1 && f.size() % stride == 0, "decimate: stride must divide the grid size");
  if (stride == 1) return f;
  Grid coarse(f.grid.half_width(), f.size() / stride);
  Field out(coarse, f.time);
  for (std::size_t k = 0; k < out.size(); ++k) out.values[k] = f.values[k * stride];
  return out;
}

// ---------------------------------------------------------------------------

GaugeState GaugeState::start(const Field& w_tilde, double gamma_total) {
  require(gamma_total > 0.0, "gauge: total dispersion must be positive at the anchor");
  GaugeState s;
  s.phase_integral.assign(w_tilde.size(), 0.0);
  s.last_integrand.resize(w_tilde.size());
  for (std::size_t k = 0; k < w_tilde.size(); ++k) {
    s.last_integrand[k] = std::norm(w_tilde.values[k]) / (2.0 * gamma_total);
  }
  s.anchor_time = s.last_time = w_tilde.time;
  return s;
}

void accumulate_gauge(GaugeState& state, const Field& w_tilde, double gamma_total) {
  if (!(w_tilde.time > state.last_time)) {
    std::ostringstream msg;
    msg << "accumulate_gauge: time " << w_tilde.time << " does not follow " << state.last_time;
    fail(ErrorCode::InvalidArgument, msg.str());
  }
  require(w_tilde.size() == state.phase_integral.size(), "accumulate_gauge: grid mismatch");
  require(gamma_total > 0.0, "accumulate_gauge: total dispersion must be positive");
  const double half_step = 0.5 * (w_tilde.time - state.last_time);
  for (std::size_t k = 0; k < w_tilde.size(); ++k) {
    const double next = std::norm(w_tilde.values[k]) / (2.0 * gamma_total);
    state.phase_integral[k] += half_step * (state.last_integrand[k] + next);
    state.last_integrand[k] = next;
  }
  state.last_time = w_tilde.time;
}

void accumulate_gauge(GaugeState& state, const Field& w_tilde, const DispersionSchedule& schedule) {
  accumulate_gauge(state, w_tilde, schedule.total(w_tilde.time, 0.0));
}

Field gauge(const Field& w_tilde, const GaugeState& state) {
  require(w_tilde.size() == state.phase_integral.size(), "gauge: grid mismatch");
  Field g = w_tilde;
  for (std::size_t k = 0; k < g.size(); ++k) g.values[k] *= std::polar(1.0, -state.phase_integral[k]);
  return g;
}

std::vector<double> compute_psi(const std::vector<double>& phase_integral, const Field& g, double t,
                                double anchor_time, double avg) {
  require(phase_integral.size() == g.size(), "compute_psi: grid mismatch");
  require(t >= anchor_time && anchor_time > 0.0, "compute_psi: need t >= T0 > 0");
  const double lg = std::log(t / anchor_time) / (2.0 * avg);
  std::vector<double> psi(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) psi[k] = phase_integral[k] - std::norm(g.values[k]) * lg;
  return psi;
}

// ---------------------------------------------------------------------------

ScatteringTracker::ScatteringTracker(const Grid& grid, const DispersionSchedule& schedule,
                                     double anchor_time, std::size_t profile_points)
    : grid_(grid),
      profile_grid_(grid.dual()),
      schedule_(schedule),
      anchor_(anchor_time),
      stride_(1) {
  require(anchor_time > 0.0, "scattering tracker: anchor time must be positive");
  require(profile_points >= 16 && profile_points <= grid.size() && grid.size() % profile_points == 0,
          "scattering tracker: profile points must divide the grid size");
  stride_ = grid.size() / profile_points;
  profile_grid_ = Grid(grid.dual().half_width(), profile_points);
}

ScatteringTracker ScatteringTracker::replay(const Grid& profile_grid, const DispersionSchedule& schedule,
                                            double anchor_time, std::vector<TrackEntry> entries) {
  ScatteringTracker track(profile_grid.dual(), schedule, anchor_time, profile_grid.size());
  const std::size_t n = profile_grid.size();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    require(e.w.size() == n && e.w_tilde.size() == n && e.phase.size() == n,
            "scattering replay: entry size does not match the profile grid");
    require(i == 0 ? e.t >= anchor_time : e.t > entries[i - 1].t, "scattering replay: times must increase");
  }
  track.entries_ = std::move(entries);
  return track;
}

void ScatteringTracker::observe(const Field& u) {
  if (u.time < anchor_ * (1.0 - 1e-12)) return;
  const double gamma = schedule_.total(u.time, 0.0);
  const Field w = to_profile_w(u, schedule_);
  const Field w_tilde = decimate(cut_low(w, u.time), stride_);

  if (!gauge_) {
    gauge_ = GaugeState::start(w_tilde, gamma);
    anchor_ = u.time;
  } else {
    accumulate_gauge(*gauge_, w_tilde, gamma);
  }
  TrackEntry entry;
  entry.t = u.time;
  entry.gamma_total = gamma;
  entry.w = decimate(w, stride_).values;
  entry.w_tilde = w_tilde.values;
  entry.phase = gauge_->phase_integral;
  entries_.push_back(std::move(entry));
}

std::vector<cplx> ScatteringTracker::g(std::size_t i) const {
  const auto& e = entries_.at(i);
  std::vector<cplx> out(e.w_tilde.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::polar(1.0, -e.phase[k]) * e.w_tilde[k];
  return out;
}

std::vector<double> ScatteringTracker::psi(std::size_t i) const {
  const auto& e = entries_.at(i);
  return compute_psi(e.phase, Field(profile_grid_, e.t, g(i)), e.t, anchor_, average());
}

ScatteringProfile extract_profile(const ScatteringTracker& track, double window_start,
                                  double window_end) {
  const auto& entries = track.entries();
  require(!entries.empty(), "extract_profile: empty run log");
  if (window_end - window_start < 1.0) {
    fail(ErrorCode::InvalidArgument, "extract_profile: window shorter than one dispersion period");
  }
  if (window_start < std::max(track.anchor_time(), 10.0)) {
    fail(ErrorCode::InvalidArgument, "extract_profile: window must start after max(T0, 10)");
  }
  const double slack = 1e-9 * std::max(1.0, window_end);
  if (window_end > entries.back().t + slack) {
    fail(ErrorCode::InvalidArgument, "extract_profile: window extends past the simulated range");
  }

  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].t >= window_start - slack && entries[i].t <= window_end + slack) idx.push_back(i);
  }
  require(idx.size() >= 2, "extract_profile: fewer than two observations in the window");

  const std::size_t n = track.profile_grid().size();
  ScatteringProfile p{track.profile_grid(), std::vector<cplx>(n), std::vector<double>(n),
                      std::vector<cplx>(n)};
  p.T0 = track.anchor_time();
  p.avg = track.average();
  p.window_start = entries[idx.front()].t;
  p.window_end = entries[idx.back()].t;
  p.samples = idx.size();

  // Trapezoidal time average over the (possibly irregular) lattice.
  const double span = p.window_end - p.window_start;
  std::vector<std::vector<cplx>> gs;
  gs.reserve(idx.size());
  for (std::size_t q = 0; q < idx.size(); ++q) {
    const double left = q > 0 ? entries[idx[q]].t - entries[idx[q - 1]].t : 0.0;
    const double right = q + 1 < idx.size() ? entries[idx[q + 1]].t - entries[idx[q]].t : 0.0;
    const double weight = 0.5 * (left + right) / span;
    gs.push_back(track.g(idx[q]));
    const auto psi = track.psi(idx[q]);
    for (std::size_t k = 0; k < n; ++k) {
      p.W0[k] += weight * gs.back()[k];
      p.Phi[k] += weight * psi[k];
    }
  }
  double peak = 0.0;
  for (std::size_t k = 0; k < n; ++k) peak = std::max(peak, std::abs(p.W0[k]));
  for (const auto& g : gs) {
    for (std::size_t k = 0; k < n; ++k) p.drift = std::max(p.drift, std::abs(g[k] - p.W0[k]));
  }
  if (p.drift > 0.1 * peak && peak > 0.0) {
    warn("extract_profile: g drifts by more than 10% of sup|W0| inside the window");
  }
  const double log_anchor = std::log(p.T0) / (2.0 * p.avg);
  for (std::size_t k = 0; k < n; ++k) {
    p.W[k] = std::polar(1.0, p.Phi[k] - std::norm(p.W0[k]) * log_anchor) * p.W0[k];
  }
  return p;
}

Field asymptotic_field(const ScatteringProfile& profile, double t, const Grid& grid,
                       const DispersionSchedule& schedule) {
  require(t >= profile.T0 * (1.0 - 1e-12), "asymptotic_field: t must be >= T0");
  const double gamma = schedule.total(t, 0.0);
  require(gamma > 0.0, "asymptotic_field: total dispersion must be positive");

  // h = exp(i|W|^2 log t / 2<gamma>) W on the profile grid, then its transform
  // on the dual (y) grid gives the trigonometric interpolant coefficients.
  const double lg = std::log(t) / (2.0 * profile.avg);
  Field h(profile.xi_grid, t);
  for (std::size_t k = 0; k < h.size(); ++k) {
    h.values[k] = std::polar(1.0, std::norm(profile.W[k]) * lg) * profile.W[k];
  }
  const Field coeff = inverse_ft(h);  // h(xi) = (2pi)^{-1/2} sum_y e^{-i y xi} H(y) dy

  // Profile mass that the x-grid cannot reach.
  const double reach = grid.half_width() / (2.0 * gamma);
  double total = 0.0;
  double outside = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double m = std::norm(profile.W[k]);
    total += m;
    if (std::abs(profile.xi_grid.x(k)) > reach) outside += m;
  }
  if (total > 0.0 && outside > 1e-8 * total) {
    warn("asymptotic_field: profile support exceeds the spatial grid at this time");
  }

  std::vector<std::size_t> active;
  double cmax = 0.0;
  for (const auto& c : coeff.values) cmax = std::max(cmax, std::abs(c));
  for (std::size_t i = 0; i < coeff.size(); ++i) {
    if (std::abs(coeff.values[i]) > 1e-17 * cmax) active.push_back(i);
  }

  const double scale = coeff.grid.dx() / std::sqrt(2.0 * pi);
  const double band = profile.xi_grid.half_width();
  const cplx root = 1.0 / std::sqrt(cplx(0.0, 2.0 * gamma));
  Field out(grid, t);
  if (cmax == 0.0) return out;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double x = grid.x(j);
    const double xi = x / (2.0 * gamma);
    if (std::abs(xi) > band) continue;
    cplx sum = 0.0;
    for (std::size_t i : active) sum += coeff.values[i] * std::polar(1.0, -coeff.grid.x(i) * xi);
    out.values[j] = root * std::polar(1.0, x * x / (4.0 * gamma)) * (scale * sum);
  }
  return out;
}

double residual(const Field& u, const ScatteringProfile& profile, const DispersionSchedule& schedule) {
  const Field a = asymptotic_field(profile, u.time, u.grid, schedule);
  double worst = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) worst = std::max(worst, std::abs(u.values[j] - a.values[j]));
  return worst;
}

double profile_residual(std::span<const cplx> w, const ScatteringProfile& profile, double t) {
  require(w.size() == profile.W.size(), "profile_residual: grid mismatch");
  const double lg = std::log(t) / (2.0 * profile.avg);
  double worst = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const cplx model = std::polar(1.0, std::norm(profile.W[k]) * lg) * profile.W[k];
    worst = std::max(worst, std::abs(w[k] - model));
  }
  return worst;
}

std::vector<double> unwrap_phase(std::span<const cplx> samples) {
  std::vector<double> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double a = std::arg(samples[i]);
    if (i > 0) a += 2.0 * pi * std::round((out[i - 1] - a) / (2.0 * pi));
    out[i] = a;
  }
  return out;
}

}  // namespace dmnls
