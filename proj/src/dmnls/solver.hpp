#pragma once

#include <functional>
#include <vector>

#include "dmnls/dispersion.hpp"
#include "dmnls/spectral.hpp"

namespace dmnls {

struct StepControl {
  double dt = 0.005;           // target step; at most 1/4
  bool dealias = false;        // 2/3-rule filter after every free substep
  double nonlinearity = 1.0;   // kappa in i u_t + gamma u_xx = -kappa |u|^2 u; 0 = linear
  double observe_every = 0.5;  // observer lattice spacing
  double edge_limit = 1e-8;    // abort when mass in |x| > 0.9 L exceeds this fraction
  bool record_steps = false;

  void validate() const;
};

struct StepRecord {
  double start;
  double end;
  double gamma;
};

struct EvolveResult {
  Field field;
  std::vector<StepRecord> steps;  // filled when StepControl::record_steps is set
  double mass_drift = 0.0;        // |m(t_end) - m(t0)| / m(t0)
  std::size_t step_count = 0;
};

using Observer = std::function<void(const Field&)>;

/// Exact flow of i u_t = -kappa |u|^2 u over time h.
Field nonlinear_phase_step(const Field& field, double h, double nonlinearity = 1.0);

/// One symmetric split step over [t, t + dt]; the interval must lie inside one
/// constant-coefficient segment of the schedule.
Field step_strang(const Field& field, double dt, const DispersionSchedule& schedule,
                  double nonlinearity = 1.0);

/// Marches step_strang from u0.time to t_end with steps aligned to the
/// breakpoints k/2 and to the observer lattice. Observers fire at u0.time, at
/// every lattice point and at t_end.
EvolveResult evolve(const Field& u0, double t_end, const StepControl& control,
                    const DispersionSchedule& schedule, const Observer& observer = {});

/// Constant coefficient gamma == avg.
EvolveResult evolve_standard(const Field& u0, double t_end, const StepControl& control, double avg,
                             const Observer& observer = {});

/// Period-averaged cubic term: int_0^1 e^{-iD Delta}(|e^{iD Delta}u|^2 e^{iD Delta}u) dtau,
/// D(tau) = Gamma(tau) - <gamma> tau, by composite midpoint with the nodes split
/// evenly between [0, 1/2] and [1/2, 1].
Field gt_nonlinearity(const Field& field, const DispersionSchedule& schedule, int nodes);

/// Averaged model: free part with <gamma>, nonlinear substep by explicit midpoint.
EvolveResult evolve_gt(const Field& u0, double t_end, const StepControl& control,
                       const DispersionSchedule& schedule, int nodes,
                       const Observer& observer = {});

}  // namespace dmnls
