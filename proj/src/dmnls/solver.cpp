#include "dmnls/solver.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "dmnls/error.hpp"

namespace dmnls {
namespace {

constexpr double kTimeSlack = 1e-12;

bool same_segment(double start, double end) {
  return DispersionSchedule::next_break(start) >= end - kTimeSlack * std::max(1.0, std::abs(end));
}

// Split-step engine. The trailing half free substep of one step is fused with
// the leading half of the next, so each step costs one transform pair; the
// pending dispersion is flushed before the field is handed to an observer.
class SplitStepper {
 public:
  SplitStepper(const Grid& grid, const StepControl& control)
      : control_(control),
        k_(grid.fft_wavenumbers()),
        fft_(transform_for(grid.size())),
        spectrum_(grid.size()),
        dealias_cut_(2.0 / 3.0 * grid.nyquist()) {}

  void propagate(std::vector<cplx>& u, double a) {
    if (a == 0.0 && !control_.dealias) return;
    const auto& symbol = multiplier(a);
    fft_.forward(u, spectrum_);
    for (std::size_t m = 0; m < spectrum_.size(); ++m) spectrum_[m] *= symbol[m];
    fft_.backward(spectrum_, u);
  }

  void nonlinear(std::vector<cplx>& u, double h) const {
    const double c = control_.nonlinearity * h;
    if (c == 0.0) return;
    for (auto& z : u) z *= std::polar(1.0, c * std::norm(z));
  }

 private:
  const std::vector<cplx>& multiplier(double a) {
    for (auto& entry : cache_) {
      if (entry.first == a) return entry.second;
    }
    if (cache_.size() >= 6) cache_.erase(cache_.begin());
    std::vector<cplx> symbol(k_.size());
    const double scale = 1.0 / static_cast<double>(k_.size());
    for (std::size_t m = 0; m < k_.size(); ++m) {
      const bool kept = !control_.dealias || std::abs(k_[m]) <= dealias_cut_;
      symbol[m] = kept ? std::polar(scale, -a * k_[m] * k_[m]) : cplx(0.0);
    }
    cache_.emplace_back(a, std::move(symbol));
    return cache_.back().second;
  }

  const StepControl& control_;
  std::vector<double> k_;
  Transform& fft_;
  std::vector<cplx> spectrum_;
  double dealias_cut_;
  std::vector<std::pair<double, std::vector<cplx>>> cache_;
};

using NonlinearSubstep = std::function<void(std::vector<cplx>&, double)>;

void check_health(const Field& u, const StepControl& control) {
  if (!u.finite()) {
    std::ostringstream msg;
    msg << "solver produced non-finite values at t=" << u.time;
    fail(ErrorCode::Solver, msg.str());
  }
  const double edge = u.edge_mass_fraction(0.9);
  if (edge > control.edge_limit) {
    std::ostringstream msg;
    msg << "boundary mass monitor tripped at t=" << u.time << " (fraction " << edge
        << " in |x| > 0.9L); enlarge the domain";
    fail(ErrorCode::Wraparound, msg.str());
  }
}

// Shared marching loop. gamma_of(t) returns the constant coefficient of the
// segment containing [t, t + h]; substep advances the nonlinear part.
EvolveResult march(const Field& u0, double t_end, const StepControl& control,
                   const std::function<double(double)>& gamma_of, const NonlinearSubstep& substep,
                   const Observer& observer) {
  control.validate();
  require(std::isfinite(t_end) && t_end >= u0.time, "evolve: t_end must be >= initial time");
  require(u0.finite(), "evolve: initial field is not finite");

  EvolveResult result{u0, {}, 0.0, 0};
  Field& u = result.field;
  const double t0 = u0.time;
  const double mass0 = u0.l2_norm();

  check_health(u, control);
  if (observer) observer(u);
  if (t_end == t0) return result;

  SplitStepper stepper(u.grid, control);
  double pending = 0.0;
  long obs_index = 1;
  double next_obs = t0 + control.observe_every;
  double t = t0;

  while (t < t_end) {
    const double chunk_end = std::min({DispersionSchedule::next_break(t), next_obs, t_end});
    const double span = chunk_end - t;
    const auto n = static_cast<long>(std::max(1.0, std::ceil(span / control.dt - 1e-9)));
    const double h = span / static_cast<double>(n);
    const double gamma = gamma_of(t + 0.5 * span);
    for (long i = 0; i < n; ++i) {
      const double ts = t + static_cast<double>(i) * h;
      const double te = (i + 1 == n) ? chunk_end : t + static_cast<double>(i + 1) * h;
      stepper.propagate(u.values, pending + 0.5 * gamma * h);
      substep(u.values, h);
      pending = 0.5 * gamma * h;
      if (control.record_steps) result.steps.push_back({ts, te, gamma});
      ++result.step_count;
    }
    t = chunk_end;

    const bool at_obs = std::abs(t - next_obs) <= kTimeSlack * std::max(1.0, std::abs(t));
    if (at_obs || t >= t_end) {
      stepper.propagate(u.values, pending);
      pending = 0.0;
      u.time = t;
      check_health(u, control);
      if (observer) observer(u);
      if (at_obs) {
        ++obs_index;
        next_obs = t0 + static_cast<double>(obs_index) * control.observe_every;
      }
    }
  }
  u.time = t_end;
  result.mass_drift = mass0 > 0.0 ? std::abs(u.l2_norm() - mass0) / mass0 : 0.0;
  return result;
}

}  // namespace

void StepControl::validate() const {
  require(std::isfinite(dt) && dt > 0.0 && dt <= 0.25, "step control: dt must lie in (0, 1/4]");
  require(std::isfinite(observe_every) && observe_every > 0.0,
          "step control: observation interval must be positive");
  require(std::isfinite(nonlinearity), "step control: nonlinearity must be finite");
}

Field nonlinear_phase_step(const Field& field, double h, double nonlinearity) {
  Field out = field;
  const double c = nonlinearity * h;
  if (c == 0.0) return out;
  for (auto& z : out.values) z *= std::polar(1.0, c * std::norm(z));
  return out;
}

Field step_strang(const Field& field, double dt, const DispersionSchedule& schedule,
                  double nonlinearity) {
  const double t = field.time;
  if (!same_segment(t, t + dt)) {
    std::ostringstream msg;
    msg << "step_strang: [" << t << ", " << t + dt << "] straddles a dispersion breakpoint";
    fail(ErrorCode::InvalidArgument, msg.str());
  }
  const double mid = t + 0.5 * dt;
  Field u = free_propagate(field, schedule.total(mid, t));
  u = nonlinear_phase_step(u, dt, nonlinearity);
  u = free_propagate(u, schedule.total(t + dt, mid));
  u.time = t + dt;
  return u;
}

EvolveResult evolve(const Field& u0, double t_end, const StepControl& control,
                    const DispersionSchedule& schedule, const Observer& observer) {
  const double kappa = control.nonlinearity;
  return march(
      u0, t_end, control, [&schedule](double t) { return schedule.eval(t); },
      [kappa](std::vector<cplx>& u, double h) {
        const double c = kappa * h;
        if (c == 0.0) return;
        for (auto& z : u) z *= std::polar(1.0, c * std::norm(z));
      },
      observer);
}

EvolveResult evolve_standard(const Field& u0, double t_end, const StepControl& control, double avg,
                             const Observer& observer) {
  return evolve(u0, t_end, control, DispersionSchedule::constant(avg), observer);
}

namespace {

struct QuadratureNode {
  double weight;
  double offset;  // D(tau)
};

std::vector<QuadratureNode> gt_nodes(const DispersionSchedule& schedule, int nodes) {
  require(nodes >= 2, "gt_nonlinearity: need at least 2 quadrature nodes");
  const int first = (nodes + 1) / 2;
  const int second = nodes - first;
  const double avg = schedule.average();
  std::vector<QuadratureNode> out;
  out.reserve(static_cast<std::size_t>(nodes));
  auto add = [&](double lo, int count) {
    const double w = 0.5 / count;
    for (int i = 0; i < count; ++i) {
      const double tau = lo + (i + 0.5) * w;
      out.push_back({w, schedule.total(tau, 0.0) - avg * tau});
    }
  };
  add(0.0, first);
  add(0.5, second);
  return out;
}

// Evaluates the GT term for fields on a fixed grid, reusing scratch buffers.
class GtEvaluator {
 public:
  GtEvaluator(const Grid& grid, const DispersionSchedule& schedule, int nodes)
      : nodes_(gt_nodes(schedule, nodes)),
        k_(grid.fft_wavenumbers()),
        fft_(transform_for(grid.size())),
        hat_(grid.size()),
        acc_hat_(grid.size()),
        work_(grid.size()) {}

  void operator()(std::span<const cplx> u, std::span<cplx> out) {
    const std::size_t n = u.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    bool any_fourier = false;
    std::fill(out.begin(), out.end(), cplx(0.0));
    std::fill(acc_hat_.begin(), acc_hat_.end(), cplx(0.0));
    for (const auto& node : nodes_) {
      if (node.offset == 0.0) {
        for (std::size_t j = 0; j < n; ++j) out[j] += node.weight * std::norm(u[j]) * u[j];
        continue;
      }
      if (!any_fourier) {
        fft_.forward(u, hat_);
        any_fourier = true;
      }
      for (std::size_t m = 0; m < n; ++m) {
        work_[m] = hat_[m] * std::polar(inv_n, -node.offset * k_[m] * k_[m]);
      }
      fft_.backward(work_, work_);
      for (auto& z : work_) z *= std::norm(z);
      fft_.forward(work_, work_);
      for (std::size_t m = 0; m < n; ++m) {
        acc_hat_[m] += work_[m] * std::polar(node.weight * inv_n, node.offset * k_[m] * k_[m]);
      }
    }
    if (any_fourier) {
      fft_.backward(acc_hat_, work_);
      for (std::size_t j = 0; j < n; ++j) out[j] += work_[j];
    }
  }

 private:
  std::vector<QuadratureNode> nodes_;
  std::vector<double> k_;
  Transform& fft_;
  std::vector<cplx> hat_;
  std::vector<cplx> acc_hat_;
  std::vector<cplx> work_;
};

}  // namespace

Field gt_nonlinearity(const Field& field, const DispersionSchedule& schedule, int nodes) {
  GtEvaluator eval(field.grid, schedule, nodes);
  Field out(field.grid, field.time);
  eval(field.values, out.values);
  return out;
}

EvolveResult evolve_gt(const Field& u0, double t_end, const StepControl& control,
                       const DispersionSchedule& schedule, int nodes, const Observer& observer) {
  const double avg = schedule.average();
  const double kappa = control.nonlinearity;
  auto eval = std::make_shared<GtEvaluator>(u0.grid, schedule, nodes);
  auto k1 = std::make_shared<std::vector<cplx>>(u0.size());
  auto mid = std::make_shared<std::vector<cplx>>(u0.size());
  return march(
      u0, t_end, control, [avg](double) { return avg; },
      [=](std::vector<cplx>& u, double h) {
        if (kappa == 0.0) return;
        const cplx c(0.0, kappa * h);
        (*eval)(u, *k1);
        for (std::size_t j = 0; j < u.size(); ++j) (*mid)[j] = u[j] + 0.5 * c * (*k1)[j];
        (*eval)(*mid, *k1);
        for (std::size_t j = 0; j < u.size(); ++j) u[j] += c * (*k1)[j];
      },
      observer);
}

}  // namespace dmnls
