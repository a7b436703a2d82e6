#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dmnls/dispersion.hpp"
#include "dmnls/spectral.hpp"

namespace dmnls {

/// Profile variable w(t, xi) = (2i Gamma)^{1/2} e^{-i Gamma xi^2} u(t, 2 Gamma xi), computed
/// as F[M(Gamma) e^{-i Gamma Delta} u] on the fixed grid u.grid.dual(). Requires
/// Gamma(t) > 0 (and t >= T0 for a managed map).
Field to_profile_w(const Field& u, const DispersionSchedule& schedule);

/// w~ = P_{<= sqrt t} w.
Field cut_low(const Field& w, double t);

/// Samples every stride-th point. Decimating a grid of N points by a power of
/// two yields the grid with the same half-width and N/stride points.
Field decimate(const Field& f, std::size_t stride);

/// Running phase of the integrating factor B(t) = exp(-i phase_integral).
struct GaugeState {
  std::vector<double> phase_integral;  // int_{T0}^t |w~|^2 ds / (2 Gamma(s))
  std::vector<double> last_integrand;  // |w~(t)|^2 / (2 Gamma(t))
  double anchor_time = 0.0;
  double last_time = 0.0;

  static GaugeState start(const Field& w_tilde, double gamma_total);
};

/// Trapezoidal increment of |w~|^2/(2 Gamma) over [state.last_time, w_tilde.time].
void accumulate_gauge(GaugeState& state, const Field& w_tilde, double gamma_total);
void accumulate_gauge(GaugeState& state, const Field& w_tilde, const DispersionSchedule& schedule);

/// g = e^{-i phase} w~.
Field gauge(const Field& w_tilde, const GaugeState& state);

/// Psi(t) = phase_integral - |g|^2 log(t / T0) / (2 <gamma>).
std::vector<double> compute_psi(const std::vector<double>& phase_integral, const Field& g, double t,
                                double anchor_time, double avg);

struct TrackEntry {
  double t = 0.0;
  double gamma_total = 0.0;
  std::vector<cplx> w;        // on the profile grid
  std::vector<cplx> w_tilde;  // on the profile grid
  std::vector<double> phase;  // gauge phase integral on the profile grid
};

/// Observer-side bookkeeping from the anchor time on: builds w and w~ at each
/// observation, advances the gauge, and keeps everything on a decimated copy of
/// the dual grid.
class ScatteringTracker {
 public:
  ScatteringTracker(const Grid& grid, const DispersionSchedule& schedule, double anchor_time,
                    std::size_t profile_points);

  /// Rebuilds a tracker from a recorded log (entries on profile_grid, increasing t).
  static ScatteringTracker replay(const Grid& profile_grid, const DispersionSchedule& schedule,
                                  double anchor_time, std::vector<TrackEntry> entries);

  /// Ignores fields before the anchor time.
  void observe(const Field& u);

  const Grid& profile_grid() const noexcept { return profile_grid_; }
  std::size_t stride() const noexcept { return stride_; }
  double anchor_time() const noexcept { return anchor_; }
  double average() const noexcept { return schedule_.average(); }
  const std::vector<TrackEntry>& entries() const noexcept { return entries_; }

  /// g and Psi at entry i.
  std::vector<cplx> g(std::size_t i) const;
  std::vector<double> psi(std::size_t i) const;

 private:
  Grid grid_;
  Grid profile_grid_;
  DispersionSchedule schedule_;
  double anchor_;
  std::size_t stride_;
  std::vector<TrackEntry> entries_;
  std::optional<GaugeState> gauge_;
};

struct ScatteringProfile {
  Grid xi_grid;
  std::vector<cplx> W0;
  std::vector<double> Phi;
  std::vector<cplx> W;
  double T0 = 0.0;
  double avg = 0.0;
  double window_start = 0.0;
  double window_end = 0.0;
  double drift = 0.0;  // max |g(t) - W0| over the window
  std::size_t samples = 0;
};

/// Tail-window averages: W0 = <g>, Phi = <Psi>, W = exp(i[Phi - |W0|^2 log T0 / (2<gamma>)]) W0.
ScatteringProfile extract_profile(const ScatteringTracker& track, double window_start,
                                  double window_end);

/// (2i Gamma)^{-1/2} exp(i x^2/(4 Gamma) + i |W|^2 log t / (2<gamma>)) W(x / (2 Gamma)), with
/// W evaluated by trigonometric interpolation.
Field asymptotic_field(const ScatteringProfile& profile, double t, const Grid& grid,
                       const DispersionSchedule& schedule);

/// sup_x |u - asymptotic_field(profile, u.time)|.
double residual(const Field& u, const ScatteringProfile& profile, const DispersionSchedule& schedule);

/// sup_xi |w - exp(i |W|^2 log t / (2<gamma>)) W| on the profile grid.
double profile_residual(std::span<const cplx> w, const ScatteringProfile& profile, double t);

/// Phase of samples[i] continued to the nearest branch of its predecessor.
std::vector<double> unwrap_phase(std::span<const cplx> samples);

}  // namespace dmnls
