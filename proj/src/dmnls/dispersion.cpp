#include "dmnls/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dmnls/error.hpp"

namespace dmnls {

DispersionMap::DispersionMap(double gamma_plus, double gamma_minus)
    : gamma_plus_(gamma_plus), gamma_minus_(gamma_minus) {
  if (!(std::isfinite(gamma_plus) && std::isfinite(gamma_minus)) || gamma_plus <= 0.0 ||
      gamma_minus <= 0.0) {
    std::ostringstream msg;
    msg << "dispersion map needs gamma_plus > 0 and gamma_minus > 0 (got " << gamma_plus << ", "
        << gamma_minus << ")";
    fail(ErrorCode::InvalidArgument, msg.str());
  }
  if (!(gamma_plus > gamma_minus)) {
    std::ostringstream msg;
    msg << "dispersion map average must be positive (gamma_plus=" << gamma_plus
        << ", gamma_minus=" << gamma_minus << ")";
    fail(ErrorCode::InvalidArgument, msg.str());
  }
}

double DispersionMap::eval(double t) const noexcept {
  const double frac = t - std::floor(t);
  return frac < 0.5 ? gamma_plus_ : -gamma_minus_;
}

double DispersionMap::partial(double frac) const noexcept {
  if (frac < 0.5) return gamma_plus_ * frac;
  return 0.5 * gamma_plus_ - gamma_minus_ * (frac - 0.5);
}

double DispersionMap::total(double t, double t0) const noexcept {
  const double n = std::floor(t);
  const double n0 = std::floor(t0);
  return (n - n0) * average() + (partial(t - n) - partial(t0 - n0));
}

double DispersionMap::sup_norm() const noexcept { return std::max(gamma_plus_, gamma_minus_); }

DispersionSchedule DispersionSchedule::constant(double gamma) {
  require(std::isfinite(gamma), "constant dispersion must be finite");
  DispersionSchedule s;
  s.constant_ = gamma;
  return s;
}

double DispersionSchedule::eval(double t) const noexcept {
  return map_ ? map_->eval(t) : constant_;
}

double DispersionSchedule::total(double t, double t0) const noexcept {
  return map_ ? map_->total(t, t0) : constant_ * (t - t0);
}

double DispersionSchedule::average() const noexcept {
  return map_ ? map_->average() : constant_;
}

double DispersionSchedule::next_break(double t) noexcept {
  double b = std::floor(2.0 * t) / 2.0 + 0.5;
  while (b <= t) b += 0.5;
  return b;
}

}  // namespace dmnls
