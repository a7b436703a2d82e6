#pragma once

#include <vector>

#include "dmnls/dispersion.hpp"
#include "dmnls/spectral.hpp"

namespace dmnls {

/// <s> = (1 + s^2)^{1/2}
double japanese_bracket(double s) noexcept;

/// J(t, t0) u = x u + 2i Gamma(t, t0) u_x, with a spectral derivative.
/// Warns when x u carries mass near the boundary; throws when the weighted
/// field is dominated by wraparound (e.g. constants).
Field apply_vector_field(const Field& u, double t, double t0, const DispersionSchedule& schedule);

/// sup |J(|u|^2 u) - (2|u|^2 Ju - u^2 conj(Ju))| / (||u||_inf^2 ||Ju||_inf).
double chain_rule_residual(const Field& u, double t, double t0, const DispersionSchedule& schedule);

/// ||J(t,t0) e^{iG(t,s)D} f - e^{iG(t,s)D} J(s,t0) f||_2 / ||J(s,t0) f||_2.
double commutation_residual(const Field& f, double t, double s, double t0,
                            const DispersionSchedule& schedule);

struct NormSample {
  double t = 0.0;
  double mass = 0.0;   // ||u||_2
  double grad = 0.0;   // ||u_x||_2
  double jnorm = 0.0;  // ||J(t, 0) u||_2
  double sup = 0.0;    // ||u||_inf
};

struct BootstrapNorms {
  double x = 0.0;
  double s = 0.0;
};

/// Append-only, strictly time-ordered norm log.
class NormSeries {
 public:
  explicit NormSeries(double delta = 0.01);

  double delta() const noexcept { return delta_; }
  const std::vector<NormSample>& samples() const noexcept { return samples_; }
  bool empty() const noexcept { return samples_.empty(); }
  std::size_t size() const noexcept { return samples_.size(); }

  void append(const NormSample& sample);

  /// Running X and S maxima after each sample.
  std::vector<BootstrapNorms> running() const;

 private:
  double delta_;
  std::vector<NormSample> samples_;
};

NormSample measure_norms(const Field& u, const DispersionSchedule& schedule);
void record_norms(const Field& u, NormSeries& series, const DispersionSchedule& schedule);

/// X = max_s {mass + <s>^{-delta}(jnorm + grad)},  S = max_s <s>^{1/2} sup.
/// Lattice maxima only; the continuous sup may be larger.
BootstrapNorms bootstrap_norms(const NormSeries& series);

}  // namespace dmnls
