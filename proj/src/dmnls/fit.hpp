#pragma once

#include <limits>
#include <span>

namespace dmnls {

struct PowerFit {
  double slope = 0.0;
  double intercept = 0.0;  // log of the prefactor
  double r2 = 0.0;
  std::size_t samples = 0;
};

/// Least-squares line through (log t, log y) over samples with
/// t_min <= t <= t_max. Needs at least 10 such samples, all with y > 0.
PowerFit fit_power_law(std::span<const double> t, std::span<const double> y, double t_min,
                       double t_max = std::numeric_limits<double>::infinity());

/// phase(t) ~ offset + slope log t + correction / Gamma(t): the logarithmic phase
/// drift with the O(1/Gamma) term of the linear profile expansion as a nuisance.
struct LogPhaseFit {
  double slope = 0.0;
  double offset = 0.0;
  double correction = 0.0;
  double r2 = 0.0;
  std::size_t samples = 0;
};

LogPhaseFit fit_log_phase(std::span<const double> t, std::span<const double> phase,
                          std::span<const double> gamma_total, double t_min,
                          double t_max = std::numeric_limits<double>::infinity());

}  // namespace dmnls
