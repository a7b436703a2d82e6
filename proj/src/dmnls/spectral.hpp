#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace dmnls {

using cplx = std::complex<double>;

/// Uniform periodic grid on [-L, L) with N points and its dual wavenumber grid
/// xi_k = -pi/dx + k * pi/L, k = 0..N-1.
class Grid {
 public:
  Grid(double half_width, std::size_t size);

  double half_width() const noexcept { return half_width_; }
  std::size_t size() const noexcept { return size_; }
  double dx() const noexcept { return 2.0 * half_width_ / static_cast<double>(size_); }
  double x(std::size_t j) const noexcept { return -half_width_ + static_cast<double>(j) * dx(); }
  std::vector<double> points() const;

  /// pi/dx, the half-width of the dual grid.
  double nyquist() const noexcept { return dual_half_width_; }
  double dxi() const noexcept { return 2.0 * dual_half_width_ / static_cast<double>(size_); }

  /// Grid of the transformed variable; dual().dual() == *this exactly.
  Grid dual() const noexcept { return Grid(dual_half_width_, size_, half_width_); }

  /// Wavenumbers in FFT storage order (0, dxi, ..., -nyquist, ..., -dxi).
  std::vector<double> fft_wavenumbers() const;

  bool operator==(const Grid& other) const noexcept {
    return half_width_ == other.half_width_ && size_ == other.size_;
  }

 private:
  Grid(double half_width, std::size_t size, double dual_half_width) noexcept
      : half_width_(half_width), size_(size), dual_half_width_(dual_half_width) {}

  double half_width_;
  std::size_t size_;
  double dual_half_width_;
};

/// Complex samples on a grid, stamped with a physical time.
struct Field {
  Grid grid;
  double time = 0.0;
  std::vector<cplx> values;

  Field(Grid g, double t) : grid(g), time(t), values(g.size()) {}
  Field(Grid g, double t, std::vector<cplx> v);

  static Field sample(const Grid& g, double t, const std::function<cplx(double)>& f);

  std::size_t size() const noexcept { return values.size(); }
  bool finite() const noexcept;

  double l2_norm() const noexcept;
  double sup_norm() const noexcept;
  /// Fraction of the mass carried by |x| > fraction * L.
  double edge_mass_fraction(double fraction = 0.9) const noexcept;
};

/// FFTW plans and aligned scratch for one transform length. Not shareable across
/// threads; use transform_for() to get the calling thread's instance.
class Transform {
 public:
  explicit Transform(std::size_t n);
  ~Transform();
  Transform(const Transform&) = delete;
  Transform& operator=(const Transform&) = delete;

  std::size_t size() const noexcept { return n_; }
  /// Unnormalized DFT, out_k = sum_j in_j exp(-2 pi i jk/N). In and out may alias.
  void forward(std::span<const cplx> in, std::span<cplx> out);
  /// Unnormalized inverse DFT (positive exponent).
  void backward(std::span<const cplx> in, std::span<cplx> out);

 private:
  struct Plans;
  std::size_t n_;
  std::unique_ptr<Plans> plans_;
};

Transform& transform_for(std::size_t n);

/// Applies the Fourier multiplier sigma(xi) (xi in FFT order) to the field.
Field apply_multiplier(const Field& field, std::span<const cplx> symbol_fft_order);
Field apply_multiplier(const Field& field, const std::function<cplx(double)>& symbol);

/// Continuum-normalized transform fhat(xi) = (2pi)^{-1/2} int e^{-ix xi} f dx,
/// sampled on grid.dual().
Field forward_ft(const Field& field);
Field inverse_ft(const Field& spectrum);

/// e^{i a Delta}: multiplier e^{-i a xi^2}.
Field free_propagate(const Field& field, double a);

/// Spectral d/dx (the Nyquist mode is dropped).
Field derivative(const Field& field);
/// ||d/dx f||_2 through Plancherel.
double gradient_norm(const Field& field);

/// Raised-cosine low-pass profile: 1 on [0,1], cos^2(pi (r-1)/2) on (1,2), 0 beyond.
double lowpass_symbol(double r) noexcept;
/// Radial derivative of lowpass_symbol, evaluated at |r|.
double lowpass_symbol_derivative(double r) noexcept;

/// P_{<=K}: multiplier lowpass_symbol(xi/K).
Field project_low(const Field& field, double cutoff);
/// Multiplier lowpass_symbol_derivative(xi/K), supported on K <= |xi| <= 2K.
Field project_band_derivative(const Field& field, double cutoff);

/// M(a) D(a) F M(a) applied to the field, with the dilation realized by
/// trigonometric interpolation of the sampled transform. Agrees with
/// free_propagate(field, a) for data decaying inside the domain.
Field mdfm_factorization(const Field& field, double a);

}  // namespace dmnls
