#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dmnls/error.hpp"
#include "dmnls/run.hpp"
#include "dmnls/scattering.hpp"

using namespace dmnls;
using std::numbers::pi;

namespace {

const DispersionMap kMap(2.0, 1.0);
const DispersionSchedule kSchedule = kMap;

// u = M(G) D(G) phi at time t, phi(xi) given analytically.
Field modulated(const Grid& g, double t, const std::function<cplx(double)>& phi) {
  const double G = kMap.total(t);
  const cplx root = 1.0 / std::sqrt(cplx(0.0, 2.0 * G));
  return Field::sample(g, t, [&](double x) { return root * std::polar(1.0, x * x / (4 * G)) * phi(x / (2 * G)); });
}

double sup_diff(const Field& f, const std::function<cplx(double)>& h) {
  double d = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) d = std::max(d, std::abs(f.values[k] - h(f.grid.x(k))));
  return d;
}

ScatteringProfile flat_profile(const Grid& xi_grid, const std::function<cplx(double)>& W) {
  ScatteringProfile p{xi_grid, std::vector<cplx>(xi_grid.size()), std::vector<double>(xi_grid.size()),
                      std::vector<cplx>(xi_grid.size())};
  for (std::size_t k = 0; k < xi_grid.size(); ++k) p.W0[k] = p.W[k] = W(xi_grid.x(k));
  p.T0 = kMap.threshold_T0();
  p.avg = kMap.average();
  return p;
}

}  // namespace

TEST_CASE("profile variable inverts the modulation") {
  const Grid g(256.0, 2048);
  const auto phi = [](double xi) { return cplx(std::exp(-xi * xi)); };
  const Field u = modulated(g, 20.0, phi);
  const Field w = to_profile_w(u, kSchedule);
  CHECK(w.grid == g.dual());
  CHECK(sup_diff(w, phi) < 1e-10);
  // ||w||_inf ~ (2 Gamma)^{1/2} ||u||_inf
  CHECK(w.sup_norm() == doctest::Approx(std::sqrt(2 * kMap.total(20.0)) * u.sup_norm()).epsilon(1e-8));

  Field early = u;
  early.time = 10.0;
  CHECK_THROWS_AS(to_profile_w(early, kSchedule), Error);
}

TEST_CASE("profile variable is unitary") {
  const Grid g(256.0, 2048);
  Rng rng(4);
  for (int i = 0; i < 3; ++i) {
    Field f = random_smooth_field(g, rng);
    f.time = 17.0 + i;
    const Field w = to_profile_w(f, kSchedule);
    CHECK(w.l2_norm() == doctest::Approx(f.l2_norm()).epsilon(1e-12));
  }
}

TEST_CASE("low-frequency cut") {
  const Grid g(16.0 * pi, 1024);
  const double t = 16.0;  // cut at 4
  const auto low = Field::sample(g, t, [](double x) { return std::polar(1.0, 3.0 * x); });
  CHECK(sup_diff(cut_low(low, t), [](double x) { return std::polar(1.0, 3.0 * x); }) < 1e-12);
  const auto high = Field::sample(g, t, [](double x) { return cplx(std::cos(9.0 * x)); });
  CHECK(cut_low(high, t).sup_norm() < 1e-12);
  const auto mid = Field::sample(g, t, [](double x) { return std::polar(1.0, 6.0 * x); });
  CHECK(sup_diff(cut_low(mid, t), [](double x) { return lowpass_symbol(1.5) * std::polar(1.0, 6.0 * x); }) < 1e-12);
  CHECK_THROWS_AS(cut_low(low, 0.0), Error);
}

TEST_CASE("decimation keeps the half-width") {
  const Grid g(10.0, 256);
  const auto f = Field::sample(g, 1.0, [](double x) { return cplx(x); });
  const Field d = decimate(f, 4);
  CHECK(d.grid == Grid(10.0, 64));
  for (std::size_t k = 0; k < d.size(); ++k) CHECK(d.values[k] == f.values[4 * k]);
}

TEST_CASE("gauge accumulation") {
  const Grid g(10.0, 32);
  const double c = 0.3, avg = 0.5;
  auto flat = [&](double t) { return Field(g, t, std::vector<cplx>(32, cplx(c, 0.0))); };

  auto state = GaugeState::start(flat(50.0), avg * 50.0);
  accumulate_gauge(state, flat(50.5), avg * 50.5);
  const double exact = c * c / (2 * avg) * std::log(50.5 / 50.0);
  for (double p : state.phase_integral) CHECK(std::abs(p - exact) < 1e-6);

  // Two steps equal the sum of their separate increments.
  auto a = GaugeState::start(flat(50.0), avg * 50.0);
  accumulate_gauge(a, flat(50.5), avg * 50.5);
  auto b = GaugeState::start(flat(50.5), avg * 50.5);
  accumulate_gauge(b, flat(51.0), avg * 51.0);
  auto both = GaugeState::start(flat(50.0), avg * 50.0);
  accumulate_gauge(both, flat(50.5), avg * 50.5);
  accumulate_gauge(both, flat(51.0), avg * 51.0);
  CHECK(both.phase_integral[0] == doctest::Approx(a.phase_integral[0] + b.phase_integral[0]).epsilon(1e-15));

  auto zero = GaugeState::start(Field(g, 20.0), 10.0);
  accumulate_gauge(zero, Field(g, 20.5), 10.25);
  for (double p : zero.phase_integral) CHECK(p == 0.0);

  CHECK_THROWS_AS(accumulate_gauge(both, flat(51.0), avg * 51.0), Error);
  CHECK_THROWS_AS(GaugeState::start(flat(1.0), 0.0), Error);
}

TEST_CASE("gauge factor") {
  const Grid g(10.0, 32);
  Rng rng(2);
  Field w(g, 20.0);
  for (auto& v : w.values) v = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
  auto state = GaugeState::start(w, 10.0);
  Field g0 = gauge(w, state);
  for (std::size_t k = 0; k < w.size(); ++k) CHECK(g0.values[k] == w.values[k]);
  for (std::size_t k = 0; k < w.size(); ++k) state.phase_integral[k] = rng.uniform(0, 10);
  Field g1 = gauge(w, state);
  for (std::size_t k = 0; k < w.size(); ++k) CHECK(std::abs(g1.values[k]) == doctest::Approx(std::abs(w.values[k])));
  std::fill(state.phase_integral.begin(), state.phase_integral.end(), pi);
  Field g2 = gauge(w, state);
  for (std::size_t k = 0; k < w.size(); ++k) CHECK(std::abs(g2.values[k] + w.values[k]) < 1e-15);
}

TEST_CASE("phase decomposition") {
  const Grid g(10.0, 16);
  const double c = 0.4, avg = 0.5, T0 = 16.0;
  const Field gc(g, 0.0, std::vector<cplx>(16, cplx(0.0, c)));

  // Gamma(s) = <gamma> s: the gauge phase cancels the log exactly.
  const double t = 120.0;
  std::vector<double> phase(16, c * c / (2 * avg) * std::log(t / T0));
  for (double p : compute_psi(phase, gc, t, T0, avg)) CHECK(std::abs(p) < 1e-14);
  for (double p : compute_psi(std::vector<double>(16, 0.0), gc, T0, T0, avg)) CHECK(p == 0.0);

  // True map (2,1): accumulate on a fine lattice and compare with the
  // segment-wise closed form of int ds / (2 Gamma(s)).
  const double t_end = 40.0, h = 0.005;
  Field g_anchor = gc;
  g_anchor.time = T0;
  auto state = GaugeState::start(g_anchor, kMap.total(T0));
  const int steps = static_cast<int>(std::lround((t_end - T0) / h));
  for (int i = 1; i <= steps; ++i) {
    Field gi = gc;
    gi.time = T0 + i * h;
    accumulate_gauge(state, gi, kSchedule);
  }
  double integral = 0.0;
  for (double a = T0; a < t_end - 1e-12; a += 0.5) {
    const double b = a + 0.5;
    integral += std::log(kMap.total(b) / kMap.total(a)) / (2.0 * kMap.eval(a));
  }
  const double expected = c * c * (integral - std::log(t_end / T0) / (2 * avg));
  const auto psi = compute_psi(state.phase_integral, gc, t_end, T0, avg);
  for (double p : psi) CHECK(std::abs(p - expected) < 1e-7);
  CHECK(std::abs(expected) > 1e-4);
}

namespace {

std::vector<TrackEntry> synthetic_log(const Grid& grid, double t0, double t1,
                                      const std::function<cplx(double, double)>& g_of) {
  std::vector<TrackEntry> out;
  for (double t = t0; t <= t1 + 1e-9; t += 0.5) {
    TrackEntry e;
    e.t = t;
    e.gamma_total = kMap.total(t);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      e.w.push_back(g_of(t, grid.x(k)));
      e.w_tilde.push_back(e.w.back());
      e.phase.push_back(0.0);
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

TEST_CASE("profile extraction on synthetic logs") {
  const Grid xi(8.0, 64);
  const auto W0 = [](double x) { return cplx(std::exp(-x * x), 0.2 * x * std::exp(-x * x)); };
  {
    const auto track = ScatteringTracker::replay(xi, kSchedule, 16.0, synthetic_log(xi, 16.0, 60.0, [&](double, double x) { return W0(x); }));
    const auto p = extract_profile(track, 20.0, 60.0);
    CHECK(p.drift < 1e-14);
    CHECK(p.samples == 81);
    for (std::size_t k = 0; k < xi.size(); ++k) {
      CHECK(std::abs(p.W0[k] - W0(xi.x(k))) < 1e-14);
      CHECK(std::abs(p.W[k]) == doctest::Approx(std::abs(p.W0[k])).epsilon(1e-14));
    }
  }
  {
    const auto eta = [](double x) { return cplx(0.0, std::exp(-(x - 1) * (x - 1))); };
    const auto track = ScatteringTracker::replay(
        xi, kSchedule, 16.0, synthetic_log(xi, 16.0, 200.0, [&](double t, double x) { return W0(x) + std::pow(t, -0.25) * eta(x); }));
    const auto p = extract_profile(track, 100.0, 200.0);
    // (1/100) int_100^200 t^{-1/4} dt
    const double bound = (std::pow(200.0, 0.75) - std::pow(100.0, 0.75)) / 0.75 / 100.0;
    double err = 0.0;
    for (std::size_t k = 0; k < xi.size(); ++k) {
      err = std::max(err, std::abs(p.W0[k] - W0(xi.x(k))));
      CHECK(std::abs(p.W[k]) == doctest::Approx(std::abs(p.W0[k])).epsilon(1e-13));
    }
    CHECK(err <= bound * (1 + 1e-6));
    CHECK(err > 0.5 * bound);
  }
  {
    const auto track = ScatteringTracker::replay(xi, kSchedule, 16.0, synthetic_log(xi, 16.0, 60.0, [&](double, double x) { return W0(x); }));
    CHECK_THROWS_AS(extract_profile(track, 20.0, 20.5), Error);
    CHECK_THROWS_AS(extract_profile(track, 12.0, 40.0), Error);
    CHECK_THROWS_AS(extract_profile(track, 30.0, 80.0), Error);
  }
}

TEST_CASE("asymptotic field") {
  const Grid g(512.0, 4096);
  const Grid xi = g.dual();
  const auto W = [](double x) { return cplx(0.2 * std::exp(-x * x), 0.05 * x * std::exp(-x * x)); };
  const auto profile = flat_profile(xi, W);
  const double t = 40.0, G = kMap.total(t);

  const Field a = asymptotic_field(profile, t, g, kSchedule);
  double wmax = 0.0;
  for (const auto& v : profile.W) wmax = std::max(wmax, std::abs(v));
  CHECK(a.sup_norm() == doctest::Approx(wmax / std::sqrt(2 * G)).epsilon(1e-6));

  // Direct formula at the grid points.
  const double lg = std::log(t) / (2 * profile.avg);
  CHECK(sup_diff(a, [&](double x) {
          const cplx w = W(x / (2 * G));
          return std::polar(1.0, x * x / (4 * G) + std::norm(w) * lg) * w / std::sqrt(cplx(0, 2 * G));
        }) < 1e-10);

  // Round trip through the profile variable recovers |W|.
  const Field w = to_profile_w(a, kSchedule);
  for (std::size_t k = 0; k < xi.size(); ++k) CHECK(std::abs(std::abs(w.values[k]) - std::abs(W(xi.x(k)))) < 1e-9);
  CHECK(profile_residual(w.values, profile, t) < 1e-9);

  CHECK(residual(a, profile, kSchedule) < 1e-10);
  const auto zero = flat_profile(xi, [](double) { return cplx(0.0); });
  CHECK(asymptotic_field(zero, t, g, kSchedule).sup_norm() == 0.0);
  CHECK(residual(a, zero, kSchedule) == doctest::Approx(a.sup_norm()));

  // Constructed perturbation.
  const double c = 0.5;
  Field pert = a;
  for (std::size_t j = 0; j < g.size(); ++j) pert.values[j] += c * std::pow(t, -0.75) * std::exp(-g.x(j) * g.x(j));
  CHECK(residual(pert, profile, kSchedule) == doctest::Approx(c * std::pow(t, -0.75)).epsilon(1e-8));
}

TEST_CASE("phase unwrapping") {
  std::vector<cplx> s;
  for (int i = 0; i < 200; ++i) s.push_back(std::polar(2.0, 0.1 * i));
  const auto ph = unwrap_phase(s);
  for (int i = 0; i < 200; ++i) CHECK(ph[i] == doctest::Approx(0.1 * i).epsilon(1e-12));
}
