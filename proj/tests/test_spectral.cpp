#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dmnls/error.hpp"
#include "dmnls/spectral.hpp"

using namespace dmnls;
using std::numbers::pi;

namespace {

double sup_diff(const Field& f, const std::function<cplx(double)>& g) {
  double d = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) d = std::max(d, std::abs(f.values[j] - g(f.grid.x(j))));
  return d;
}

double sup_diff(const Field& a, const Field& b) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, std::abs(a.values[j] - b.values[j]));
  return d;
}

cplx free_gaussian(double x, double a) {
  const cplx q(1.0, 4.0 * a);
  return std::exp(-x * x / q) / std::sqrt(q);
}

}  // namespace

TEST_CASE("grid layout") {
  const Grid g(40.0, 1024);
  CHECK(g.dx() == doctest::Approx(80.0 / 1024));
  CHECK(g.x(0) == -40.0);
  CHECK(g.nyquist() == doctest::Approx(pi / g.dx()));
  CHECK(g.dual().half_width() == g.nyquist());
  CHECK(g.dual().dual() == g);
  CHECK(g.dxi() == doctest::Approx(pi / 40.0));
  CHECK(g.dual().dx() == doctest::Approx(pi / 40.0));
  const auto k = g.fft_wavenumbers();
  CHECK(k[0] == 0.0);
  CHECK(k[1] == doctest::Approx(pi / 40.0));
  CHECK(k[512] == doctest::Approx(-g.nyquist()));
  CHECK(k[1023] == doctest::Approx(-pi / 40.0));
  CHECK_THROWS_AS(Grid(40.0, 1000), Error);
  CHECK_THROWS_AS(Grid(40.0, 8), Error);
  CHECK_THROWS_AS(Grid(-1.0, 64), Error);
}

TEST_CASE("field validation") {
  const Grid g(10.0, 64);
  CHECK_THROWS_AS(Field(g, 0.0, std::vector<cplx>(63)), Error);
  Field f(g, 0.0);
  CHECK(f.finite());
  f.values[3] = cplx(NAN, 0.0);
  CHECK_FALSE(f.finite());
}

TEST_CASE("Gaussian transform and shift theorem") {
  const Grid g(40.0, 1024);
  const auto f = Field::sample(g, 0.0, [](double x) { return cplx(std::exp(-x * x / 2)); });
  const auto fh = forward_ft(f);
  CHECK(fh.grid == g.dual());
  CHECK(sup_diff(fh, [](double k) { return cplx(std::exp(-k * k / 2)); }) < 1e-10);

  const auto s = Field::sample(g, 0.0, [](double x) { return cplx(std::exp(-(x - 1) * (x - 1) / 2)); });
  CHECK(sup_diff(forward_ft(s), [](double k) { return std::exp(cplx(0, -k)) * std::exp(-k * k / 2); }) < 1e-10);

  CHECK(forward_ft(Field(g, 0.0)).sup_norm() == 0.0);
  CHECK(sup_diff(inverse_ft(fh), f) < 1e-13);
}

TEST_CASE("Plancherel") {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> n;
  const Grid g(20.0, 512);
  Field f(g, 0.0);
  for (auto& v : f.values) v = cplx(n(gen), n(gen));
  const double a = f.l2_norm(), b = forward_ft(f).l2_norm();
  CHECK(std::abs(a - b) < 1e-12 * a);
}

TEST_CASE("free propagator") {
  const Grid g(40.0, 2048);
  const auto f = Field::sample(g, 0.0, [](double x) { return cplx(std::exp(-x * x)); });
  CHECK(sup_diff(free_propagate(f, 0.3), [](double x) { return free_gaussian(x, 0.3); }) < 1e-8);
  CHECK(sup_diff(free_propagate(f, 0.0), f) < 1e-15);
  CHECK(sup_diff(free_propagate(free_propagate(f, 0.7), -0.7), f) < 1e-12);

  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 5; ++i) {
    const double a = u(gen), b = u(gen);
    const auto ab = free_propagate(free_propagate(f, a), b);
    CHECK(sup_diff(ab, free_propagate(f, a + b)) < 1e-12);
    CHECK(std::abs(ab.l2_norm() - f.l2_norm()) < 1e-12);
  }
}

TEST_CASE("derivative and gradient norm") {
  const Grid g(20.0, 512);
  const auto f = Field::sample(g, 0.0, [](double x) { return cplx(std::exp(-x * x)); });
  CHECK(sup_diff(derivative(f), [](double x) { return cplx(-2 * x * std::exp(-x * x)); }) < 1e-10);
  // ||(e^{-x^2})'||^2 = sqrt(pi/2)
  CHECK(gradient_norm(f) == doctest::Approx(std::pow(pi / 2, 0.25)).epsilon(1e-12));
}

TEST_CASE("low-pass symbol") {
  CHECK(lowpass_symbol(0.0) == 1.0);
  CHECK(lowpass_symbol(1.0) == 1.0);
  CHECK(lowpass_symbol(-0.9) == 1.0);
  CHECK(lowpass_symbol(1.5) == doctest::Approx(0.5));
  CHECK(lowpass_symbol(2.0) == doctest::Approx(0.0));
  CHECK(lowpass_symbol(3.0) == 0.0);
  CHECK(lowpass_symbol_derivative(0.5) == 0.0);
  CHECK(lowpass_symbol_derivative(2.5) == 0.0);
  CHECK(lowpass_symbol_derivative(1.5) == doctest::Approx(-pi / 2));
  const double h = 1e-6;
  for (double r : {1.2, 1.5, 1.8}) {
    const double fd = (lowpass_symbol(r + h) - lowpass_symbol(r - h)) / (2 * h);
    CHECK(lowpass_symbol_derivative(r) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("projections") {
  const Grid g(16.0 * pi, 1024);
  const auto c2 = Field::sample(g, 0.0, [](double x) { return cplx(std::cos(2 * x)); });
  CHECK(sup_diff(project_low(c2, 8.0), c2) < 1e-12);
  const auto c20 = Field::sample(g, 0.0, [](double x) { return cplx(std::cos(20 * x)); });
  CHECK(project_low(c20, 4.0).sup_norm() < 1e-12);

  const auto gauss = Field::sample(g, 0.0, [](double x) { return cplx(std::exp(-x * x)); });
  const auto low = project_low(gauss, 0.5);
  CHECK(low.l2_norm() < gauss.l2_norm());
  const auto spec = forward_ft(low);
  for (std::size_t k = 0; k < spec.size(); ++k) {
    if (std::abs(spec.grid.x(k)) > 1.0 + 1e-12) CHECK(std::abs(spec.values[k]) < 1e-14);
  }
  // Oracle: multiplier applied to the analytic transform e^{-xi^2/4}/sqrt(2).
  const auto gh = forward_ft(gauss);
  for (std::size_t k = 0; k < spec.size(); k += 7) {
    const double xi = spec.grid.x(k);
    CHECK(std::abs(spec.values[k] - lowpass_symbol(xi / 0.5) * gh.values[k]) < 1e-13);
  }

  const double K = 2.0;
  CHECK(project_band_derivative(c2, 4.0).sup_norm() < 1e-12);
  CHECK(project_band_derivative(c20, 4.0).sup_norm() < 1e-12);
  const auto c3 = Field::sample(g, 0.0, [&](double x) { return cplx(std::cos(1.5 * K * x)); });
  CHECK(sup_diff(project_band_derivative(c3, K),
                 [&](double x) { return cplx(lowpass_symbol_derivative(1.5) * std::cos(1.5 * K * x)); }) < 1e-12);
}

TEST_CASE("Bernstein K^{1/2} scaling") {
  const Grid g(200.0, 32768);
  std::mt19937_64 gen(5);
  std::normal_distribution<double> n;
  double lo = INFINITY, hi = 0.0;
  for (double K : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0}) {
    // A few random bumps at scale 1/K, cut to |xi| <= 2K.
    std::uniform_real_distribution<double> center(-50.0, 50.0);
    std::vector<std::pair<double, cplx>> bumps;
    for (int b = 0; b < 3; ++b) bumps.emplace_back(center(gen), cplx(n(gen), n(gen)));
    Field f = Field::sample(g, 0.0, [&](double x) {
      cplx s = 0.0;
      for (const auto& [c, a] : bumps) s += a * std::exp(-K * K * (x - c) * (x - c));
      return s;
    });
    f = project_low(f, K);
    const double ratio = f.sup_norm() / (std::sqrt(K) * f.l2_norm());
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  CHECK(hi / lo < 2.0);
}

TEST_CASE("derivative comparability on single bands") {
  const Grid g(100.0, 8192);
  std::mt19937_64 gen(9);
  std::normal_distribution<double> n;
  for (double K : {1.0, 4.0, 16.0}) {
    Field f(g, 0.0);
    for (auto& v : f.values) v = cplx(n(gen), n(gen));
    const Field band = apply_multiplier(f, [&](double xi) { return cplx(lowpass_symbol(xi / K) - lowpass_symbol(2 * xi / K)); });
    const double r = gradient_norm(band) / band.l2_norm();
    CHECK(r >= K / 2 * 0.5);
    CHECK(r <= 2 * K);
  }
}

TEST_CASE("M D F M factorization") {
  {
    const Grid g(60.0, 4096);
    const auto f = Field::sample(g, 0.0, [](double x) { return cplx(std::exp(-x * x)); });
    CHECK(sup_diff(mdfm_factorization(f, 1.0), free_propagate(f, 1.0)) < 1e-6);
    CHECK(mdfm_factorization(Field(g, 0.0), 1.0).sup_norm() == 0.0);
    CHECK_THROWS_AS(mdfm_factorization(f, 0.0), Error);
    const auto flat = Field::sample(g, 0.0, [](double) { return cplx(1.0); });
    CHECK_THROWS_AS(mdfm_factorization(flat, 1.0), Error);
  }
  {
    const Grid g(200.0, 4096);
    const auto f = Field::sample(g, 0.0, [](double x) { return cplx(std::exp(-x * x)); });
    const auto m = mdfm_factorization(f, 5.0);
    CHECK(sup_diff(m, free_propagate(f, 5.0)) < 1e-6);
    CHECK(sup_diff(m, [](double x) { return free_gaussian(x, 5.0); }) < 1e-6);
  }
}
