#include "dmnls/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "dmnls/error.hpp"

namespace dmnls {

using std::numbers::pi;

Grid::Grid(double half_width, std::size_t size)
    : half_width_(half_width), size_(size), dual_half_width_(0.0) {
  if (!(std::isfinite(half_width) && half_width > 0.0)) {
    fail(ErrorCode::InvalidArgument, "grid half-width must be positive and finite");
  }
  if (size < 16 || !std::has_single_bit(size)) {
    std::ostringstream msg;
    msg << "grid size must be a power of two >= 16 (got " << size << ")";
    fail(ErrorCode::InvalidArgument, msg.str());
  }
  dual_half_width_ = pi / dx();
}

std::vector<double> Grid::points() const {
  std::vector<double> out(size_);
  for (std::size_t j = 0; j < size_; ++j) out[j] = x(j);
  return out;
}

std::vector<double> Grid::fft_wavenumbers() const {
  std::vector<double> k(size_);
  const auto n = static_cast<std::ptrdiff_t>(size_);
  const double step = dxi();
  for (std::ptrdiff_t m = 0; m < n; ++m) {
    k[m] = static_cast<double>(m < n / 2 ? m : m - n) * step;
  }
  return k;
}

Field::Field(Grid g, double t, std::vector<cplx> v) : grid(g), time(t), values(std::move(v)) {
  if (values.size() != grid.size()) {
    fail(ErrorCode::InvalidArgument, "field length does not match grid size");
  }
}

Field Field::sample(const Grid& g, double t, const std::function<cplx(double)>& f) {
  Field out(g, t);
  for (std::size_t j = 0; j < g.size(); ++j) out.values[j] = f(g.x(j));
  return out;
}

bool Field::finite() const noexcept {
  return std::all_of(values.begin(), values.end(),
                     [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

double Field::l2_norm() const noexcept {
  double sum = 0.0;
  for (const auto& z : values) sum += std::norm(z);
  return std::sqrt(sum * grid.dx());
}

double Field::sup_norm() const noexcept {
  double m = 0.0;
  for (const auto& z : values) m = std::max(m, std::abs(z));
  return m;
}

double Field::edge_mass_fraction(double fraction) const noexcept {
  double total = 0.0;
  double edge = 0.0;
  const double cut = fraction * grid.half_width();
  for (std::size_t j = 0; j < values.size(); ++j) {
    const double m = std::norm(values[j]);
    total += m;
    if (std::abs(grid.x(j)) > cut) edge += m;
  }
  return total > 0.0 ? edge / total : 0.0;
}

// ---------------------------------------------------------------------------

namespace {
std::mutex planner_mutex;  // FFTW planning is not thread-safe
}

struct Transform::Plans {
  fftw_complex* buffer = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

Transform::Transform(std::size_t n) : n_(n), plans_(std::make_unique<Plans>()) {
  std::lock_guard lock(planner_mutex);
  plans_->buffer = fftw_alloc_complex(n);
  const int len = static_cast<int>(n);
  plans_->fwd = fftw_plan_dft_1d(len, plans_->buffer, plans_->buffer, FFTW_FORWARD, FFTW_ESTIMATE);
  plans_->bwd = fftw_plan_dft_1d(len, plans_->buffer, plans_->buffer, FFTW_BACKWARD, FFTW_ESTIMATE);
}

Transform::~Transform() {
  std::lock_guard lock(planner_mutex);
  fftw_destroy_plan(plans_->fwd);
  fftw_destroy_plan(plans_->bwd);
  fftw_free(plans_->buffer);
}

void Transform::forward(std::span<const cplx> in, std::span<cplx> out) {
  std::memcpy(plans_->buffer, in.data(), n_ * sizeof(cplx));
  fftw_execute(plans_->fwd);
  std::memcpy(static_cast<void*>(out.data()), plans_->buffer, n_ * sizeof(cplx));
}

void Transform::backward(std::span<const cplx> in, std::span<cplx> out) {
  std::memcpy(plans_->buffer, in.data(), n_ * sizeof(cplx));
  fftw_execute(plans_->bwd);
  std::memcpy(static_cast<void*>(out.data()), plans_->buffer, n_ * sizeof(cplx));
}

Transform& transform_for(std::size_t n) {
  thread_local std::map<std::size_t, std::unique_ptr<Transform>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Transform>(n);
  return *slot;
}

// ---------------------------------------------------------------------------

Field apply_multiplier(const Field& field, std::span<const cplx> symbol) {
  const std::size_t n = field.size();
  require(symbol.size() == n, "multiplier length does not match field");
  auto& fft = transform_for(n);
  Field out(field.grid, field.time);
  fft.forward(field.values, out.values);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t m = 0; m < n; ++m) out.values[m] *= symbol[m] * scale;
  fft.backward(out.values, out.values);
  return out;
}

Field apply_multiplier(const Field& field, const std::function<cplx(double)>& symbol) {
  const auto k = field.grid.fft_wavenumbers();
  std::vector<cplx> s(k.size());
  for (std::size_t m = 0; m < k.size(); ++m) s[m] = symbol(k[m]);
  return apply_multiplier(field, s);
}

Field forward_ft(const Field& field) {
  require(field.finite(), "forward_ft: non-finite input");
  const std::size_t n = field.size();
  std::vector<cplx> raw(n);
  transform_for(n).forward(field.values, raw);
  // fhat(m dxi) = dx (2pi)^{-1/2} (-1)^m DFT_m; centered index k = m + N/2 mod N.
  const double scale = field.grid.dx() / std::sqrt(2.0 * pi);
  Field out(field.grid.dual(), field.time);
  for (std::size_t m = 0; m < n; ++m) {
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    out.values[(m + n / 2) % n] = raw[m] * (scale * sign);
  }
  return out;
}

Field inverse_ft(const Field& spectrum) {
  require(spectrum.finite(), "inverse_ft: non-finite input");
  const std::size_t n = spectrum.size();
  std::vector<cplx> raw(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    raw[m] = spectrum.values[(m + n / 2) % n] * sign;
  }
  transform_for(n).backward(raw, raw);
  // f(x_j) = dxi (2pi)^{-1/2} (-1)^j sum_k (-1)^k fhat_k e^{2 pi i jk/N}; the
  // shift k = m + N/2 supplies the (-1)^j.
  const double scale = spectrum.grid.dx() / std::sqrt(2.0 * pi);
  Field out(spectrum.grid.dual(), spectrum.time);
  for (std::size_t j = 0; j < n; ++j) out.values[j] = raw[j] * scale;
  return out;
}

Field free_propagate(const Field& field, double a) {
  if (a == 0.0) return field;
  return apply_multiplier(field, [a](double k) { return std::polar(1.0, -a * k * k); });
}

Field derivative(const Field& field) {
  const double nyq = field.grid.nyquist();
  return apply_multiplier(field, [nyq](double k) {
    return std::abs(k) >= nyq ? cplx(0.0) : cplx(0.0, k);
  });
}

double gradient_norm(const Field& field) {
  const std::size_t n = field.size();
  std::vector<cplx> raw(n);
  transform_for(n).forward(field.values, raw);
  const auto k = field.grid.fft_wavenumbers();
  const double nyq = field.grid.nyquist();
  double sum = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    if (std::abs(k[m]) < nyq) sum += k[m] * k[m] * std::norm(raw[m]);
  }
  // Parseval for the unnormalized DFT: sum |f_j|^2 = sum |F_m|^2 / N.
  return std::sqrt(sum * field.grid.dx() / static_cast<double>(n));
}

double lowpass_symbol(double r) noexcept {
  const double a = std::abs(r);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  const double c = std::cos(0.5 * pi * (a - 1.0));
  return c * c;
}

double lowpass_symbol_derivative(double r) noexcept {
  const double a = std::abs(r);
  if (a <= 1.0 || a >= 2.0) return 0.0;
  return -0.5 * pi * std::sin(pi * (a - 1.0));
}

Field project_low(const Field& field, double cutoff) {
  require(cutoff > 0.0, "project_low: cutoff must be positive");
  return apply_multiplier(field, [cutoff](double k) { return cplx(lowpass_symbol(k / cutoff)); });
}

Field project_band_derivative(const Field& field, double cutoff) {
  require(cutoff > 0.0, "project_band_derivative: cutoff must be positive");
  return apply_multiplier(field,
                          [cutoff](double k) { return cplx(lowpass_symbol_derivative(k / cutoff)); });
}

Field mdfm_factorization(const Field& field, double a) {
  if (!(a > 0.0)) fail(ErrorCode::InvalidArgument, "mdfm_factorization: a must be positive");
  const Grid& g = field.grid;
  const std::size_t n = field.size();
  const double peak = field.sup_norm();
  if (peak == 0.0) return Field(g, field.time);
  const double edge = std::max(std::abs(field.values.front()), std::abs(field.values.back()));
  if (edge >= 1e-8 * peak) {
    fail(ErrorCode::InvalidArgument, "mdfm_factorization: field does not decay inside the domain");
  }

  // M(a) f
  Field chirped(g, field.time);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = g.x(j);
    chirped.values[j] = std::polar(1.0, x * x / (4.0 * a)) * field.values[j];
  }

  // The dilated field needs F[M f] on |k| <= L/(2a).
  {
    const Field spec = forward_ft(chirped);
    const double reach = g.half_width() / (2.0 * a);
    double total = 0.0;
    double outside = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double m = std::norm(spec.values[k]);
      total += m;
      if (std::abs(spec.grid.x(k)) > reach) outside += m;
    }
    if (total > 0.0 && outside > 1e-8 * total) {
      warn("mdfm_factorization: dilated field extends beyond the grid");
    }
  }

  // D(a) F: evaluate the trigonometric interpolant of the transform at x/(2a).
  const double scale = g.dx() / std::sqrt(2.0 * pi);
  const cplx root = 1.0 / std::sqrt(cplx(0.0, 2.0 * a));
  const double band = g.nyquist();
  constexpr std::size_t kResync = 256;
  Field out(g, field.time);
  for (std::size_t m = 0; m < n; ++m) {
    const double xm = g.x(m);
    const double k = xm / (2.0 * a);
    if (std::abs(k) > band) continue;
    const cplx step = std::polar(1.0, -k * g.dx());
    cplx sum = 0.0;
    cplx phase;
    for (std::size_t j = 0; j < n; ++j) {
      if (j % kResync == 0) phase = std::polar(1.0, -k * g.x(j));
      sum += chirped.values[j] * phase;
      phase *= step;
    }
    out.values[m] = std::polar(1.0, xm * xm / (4.0 * a)) * root * scale * sum;
  }
  return out;
}

}  // namespace dmnls
