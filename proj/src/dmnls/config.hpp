#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dmnls/dispersion.hpp"
#include "dmnls/solver.hpp"
#include "dmnls/spectral.hpp"

namespace dmnls {

enum class SolverKind { Dmnls, Standard, Gt };
enum class DataFamily { Gaussian, ChirpedGaussian, DoubleBump, Random };

std::string_view to_string(SolverKind kind);
std::string_view to_string(DataFamily family);

/// Run configuration. Text form is one `key = value` per line; `#` starts a
/// comment; unknown or repeated keys are rejected.
struct RunConfig {
  double gamma_plus = 2.0;
  double gamma_minus = 1.0;
  bool constant_dispersion = false;  // replace the map by its average

  DataFamily family = DataFamily::Gaussian;
  double epsilon = 0.1;  // Sigma-norm of u0
  double chirp = 0.5;
  double separation = 4.0;
  std::uint64_t seed = 1;

  double half_width = 2048.0;
  std::size_t grid_size = 16384;
  double dt = 0.005;
  double t_max = 400.0;
  double obs_interval = 0.5;
  double delta = 0.01;
  double nonlinearity = 1.0;
  bool dealias = false;

  SolverKind solver = SolverKind::Dmnls;
  int gt_nodes = 8;

  double window_start = 200.0;
  double window_end = 400.0;
  std::size_t profile_points = 1024;
  double fit_t_min = 50.0;
  std::vector<double> checkpoints = {25.0, 50.0, 100.0, 200.0};

  std::string output_dir = "out";
  bool write_snapshots = true;

  static RunConfig parse(std::string_view text);
  static RunConfig load(const std::string& path);

  void set(std::string_view key, std::string_view value);
  std::string get(std::string_view key) const;
  static const std::vector<std::string>& keys();

  /// Canonical text form; parse(to_text()) reproduces the config.
  std::string to_text() const;

  void validate() const;

  DispersionMap map() const { return DispersionMap(gamma_plus, gamma_minus); }
  Grid grid() const { return Grid(half_width, grid_size); }
  StepControl step_control() const;
};

}  // namespace dmnls
