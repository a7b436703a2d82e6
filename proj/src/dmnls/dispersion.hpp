#pragma once

#include <optional>

namespace dmnls {

/// Two-piece, 1-periodic dispersion map:
///   gamma(t) = +gamma_plus  on [0, 1/2),
///   gamma(t) = -gamma_minus on [1/2, 1),
/// extended periodically. Construction enforces gamma_plus, gamma_minus > 0 and a
/// strictly positive average. More pieces would slot in here behind the same
/// interface; only the two-piece form is supported.
class DispersionMap {
 public:
  DispersionMap(double gamma_plus, double gamma_minus);

  double gamma_plus() const noexcept { return gamma_plus_; }
  double gamma_minus() const noexcept { return gamma_minus_; }

  /// gamma(t), right-continuous at the breakpoints k/2.
  double eval(double t) const noexcept;

  /// Gamma(t, t0) = integral of gamma from t0 to t, in closed form.
  double total(double t, double t0 = 0.0) const noexcept;

  double average() const noexcept { return 0.5 * (gamma_plus_ - gamma_minus_); }
  double sup_norm() const noexcept;

  /// T0 = 4 ||gamma||_inf / <gamma>; Gamma(t) >= <gamma> t / 2 for t >= T0.
  double threshold_T0() const noexcept { return 4.0 * sup_norm() / average(); }

 private:
  double partial(double frac) const noexcept;

  double gamma_plus_;
  double gamma_minus_;
};

// Free functions mirroring the member API.
inline double eval_gamma(const DispersionMap& map, double t) { return map.eval(t); }
inline double total_dispersion(const DispersionMap& map, double t, double t0) { return map.total(t, t0); }
inline double average_dispersion(const DispersionMap& map) { return map.average(); }
inline double threshold_T0(const DispersionMap& map) { return map.threshold_T0(); }

/// Dispersion coefficient as seen by the integrators and diagnostics: either the
/// managed map or a constant coefficient (the averaged comparison models).
class DispersionSchedule {
 public:
  DispersionSchedule(const DispersionMap& map) : map_(map), constant_(0.0) {}  // NOLINT(implicit)
  static DispersionSchedule constant(double gamma);

  bool is_constant() const noexcept { return !map_.has_value(); }
  const std::optional<DispersionMap>& map() const noexcept { return map_; }

  double eval(double t) const noexcept;
  double total(double t, double t0 = 0.0) const noexcept;
  double average() const noexcept;

  /// First coefficient breakpoint strictly after t. Constant schedules report the
  /// same half-integer lattice so step sequences are comparable across models.
  static double next_break(double t) noexcept;

 private:
  DispersionSchedule() : constant_(0.0) {}

  std::optional<DispersionMap> map_;
  double constant_;
};

}  // namespace dmnls
