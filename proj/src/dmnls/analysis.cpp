#include "dmnls/analysis.hpp"

#include <cmath>
#include <sstream>

#include "dmnls/error.hpp"

namespace dmnls {

double japanese_bracket(double s) noexcept { return std::sqrt(1.0 + s * s); }

Field apply_vector_field(const Field& u, double t, double t0, const DispersionSchedule& schedule) {
  const double gamma = schedule.total(t, t0);
  Field out(u.grid, u.time);
  for (std::size_t j = 0; j < u.size(); ++j) out.values[j] = u.grid.x(j) * u.values[j];

  const double edge = out.edge_mass_fraction(0.9);
  if (edge > 1e-3) {
    std::ostringstream msg;
    msg << "apply_vector_field: x u is not localized (edge mass fraction " << edge << ")";
    fail(ErrorCode::InvalidArgument, msg.str());
  }
  if (edge > 1e-8) warn("apply_vector_field: x u has mass near the boundary");

  if (gamma != 0.0) {
    const Field du = derivative(u);
    const cplx c(0.0, 2.0 * gamma);
    for (std::size_t j = 0; j < u.size(); ++j) out.values[j] += c * du.values[j];
  }
  return out;
}

double chain_rule_residual(const Field& u, double t, double t0, const DispersionSchedule& schedule) {
  const double peak = u.sup_norm();
  if (peak == 0.0) return 0.0;
  Field cubic(u.grid, u.time);
  for (std::size_t j = 0; j < u.size(); ++j) cubic.values[j] = std::norm(u.values[j]) * u.values[j];
  const Field j_cubic = apply_vector_field(cubic, t, t0, schedule);
  const Field ju = apply_vector_field(u, t, t0, schedule);
  double worst = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const cplx z = u.values[j];
    const cplx expected = 2.0 * std::norm(z) * ju.values[j] - z * z * std::conj(ju.values[j]);
    worst = std::max(worst, std::abs(j_cubic.values[j] - expected));
  }
  const double scale = peak * peak * ju.sup_norm();
  return scale > 0.0 ? worst / scale : 0.0;
}

double commutation_residual(const Field& f, double t, double s, double t0,
                            const DispersionSchedule& schedule) {
  const double a = schedule.total(t, s);
  const Field lhs = apply_vector_field(free_propagate(f, a), t, t0, schedule);
  const Field rhs = free_propagate(apply_vector_field(f, s, t0, schedule), a);
  double diff = 0.0;
  double ref = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    diff += std::norm(lhs.values[j] - rhs.values[j]);
    ref += std::norm(rhs.values[j]);
  }
  return ref > 0.0 ? std::sqrt(diff / ref) : std::sqrt(diff);
}

NormSeries::NormSeries(double delta) : delta_(delta) {
  require(std::isfinite(delta) && delta >= 0.0, "norm series: delta must be nonnegative");
}

void NormSeries::append(const NormSample& sample) {
  if (!samples_.empty() && !(sample.t > samples_.back().t)) {
    std::ostringstream msg;
    msg << "norm series: time " << sample.t << " does not follow " << samples_.back().t;
    fail(ErrorCode::InvalidArgument, msg.str());
  }
  const bool ok = std::isfinite(sample.mass) && std::isfinite(sample.grad) &&
                  std::isfinite(sample.jnorm) && std::isfinite(sample.sup) && sample.mass >= 0.0 &&
                  sample.grad >= 0.0 && sample.jnorm >= 0.0 && sample.sup >= 0.0;
  require(ok, "norm series: entries must be finite and nonnegative");
  samples_.push_back(sample);
}

std::vector<BootstrapNorms> NormSeries::running() const {
  std::vector<BootstrapNorms> out;
  out.reserve(samples_.size());
  BootstrapNorms acc;
  for (const auto& s : samples_) {
    const double bracket = japanese_bracket(s.t);
    acc.x = std::max(acc.x, s.mass + std::pow(bracket, -delta_) * (s.jnorm + s.grad));
    acc.s = std::max(acc.s, std::sqrt(bracket) * s.sup);
    out.push_back(acc);
  }
  return out;
}

NormSample measure_norms(const Field& u, const DispersionSchedule& schedule) {
  NormSample s;
  s.t = u.time;
  s.mass = u.l2_norm();
  s.grad = gradient_norm(u);
  s.jnorm = apply_vector_field(u, u.time, 0.0, schedule).l2_norm();
  s.sup = u.sup_norm();
  return s;
}

void record_norms(const Field& u, NormSeries& series, const DispersionSchedule& schedule) {
  series.append(measure_norms(u, schedule));
}

BootstrapNorms bootstrap_norms(const NormSeries& series) {
  require(!series.empty(), "bootstrap_norms: empty series");
  return series.running().back();
}

}  // namespace dmnls
