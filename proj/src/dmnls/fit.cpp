#include "dmnls/fit.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "dmnls/error.hpp"

namespace dmnls {

PowerFit fit_power_law(std::span<const double> t, std::span<const double> y, double t_min,
                       double t_max) {
  require(t.size() == y.size(), "fit_power_law: t and y differ in length");
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_min || t[i] > t_max) continue;
    if (!(y[i] > 0.0) || !std::isfinite(y[i])) {
      std::ostringstream msg;
      msg << "fit_power_law: nonpositive sample y=" << y[i] << " at t=" << t[i];
      fail(ErrorCode::InvalidArgument, msg.str());
    }
    require(t[i] > 0.0, "fit_power_law: times must be positive");
    lx.push_back(std::log(t[i]));
    ly.push_back(std::log(y[i]));
  }
  if (lx.size() < 10) {
    std::ostringstream msg;
    msg << "fit_power_law: need at least 10 samples in range (have " << lx.size() << ")";
    fail(ErrorCode::InvalidArgument, msg.str());
  }

  const double n = static_cast<double>(lx.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  require(sxx > 0.0, "fit_power_law: all sample times coincide");

  PowerFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    sse += r * r;
  }
  fit.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  fit.samples = lx.size();
  return fit;
}

LogPhaseFit fit_log_phase(std::span<const double> t, std::span<const double> phase,
                          std::span<const double> gamma_total, double t_min, double t_max) {
  require(t.size() == phase.size() && t.size() == gamma_total.size(),
          "fit_log_phase: input lengths differ");
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_min || t[i] > t_max) continue;
    require(t[i] > 0.0 && gamma_total[i] > 0.0, "fit_log_phase: need t > 0 and Gamma > 0");
    require(std::isfinite(phase[i]), "fit_log_phase: non-finite phase");
    idx.push_back(i);
  }
  if (idx.size() < 10) {
    std::ostringstream msg;
    msg << "fit_log_phase: need at least 10 samples in range (have " << idx.size() << ")";
    fail(ErrorCode::InvalidArgument, msg.str());
  }

  const auto n = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const std::size_t i = idx[static_cast<std::size_t>(r)];
    a(r, 0) = 1.0;
    a(r, 1) = std::log(t[i]);
    a(r, 2) = 1.0 / gamma_total[i];
    y(r) = phase[i];
  }
  const Eigen::Vector3d c = a.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd res = y - a * c;
  const double mean = y.mean();
  const double syy = (y.array() - mean).square().sum();

  LogPhaseFit fit;
  fit.offset = c(0);
  fit.slope = c(1);
  fit.correction = c(2);
  fit.r2 = syy > 0.0 ? 1.0 - res.squaredNorm() / syy : 1.0;
  fit.samples = idx.size();
  return fit;
}

}  // namespace dmnls
