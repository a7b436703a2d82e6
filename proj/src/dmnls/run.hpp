#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dmnls/analysis.hpp"
#include "dmnls/config.hpp"
#include "dmnls/error.hpp"
#include "dmnls/fit.hpp"
#include "dmnls/scattering.hpp"

namespace dmnls {

/// Portable splitmix-style generator; the same seed gives the same stream on
/// every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  double uniform(double lo = 0.0, double hi = 1.0);

 private:
  std::uint64_t state_;
};

/// ||f||_2 + ||f'||_2 + ||x f||_2
double sigma_norm(const Field& f);

/// Initial data of the configured family, rescaled so its Sigma-norm is epsilon.
Field initial_data(const RunConfig& config);

/// Sum of a few chirped Gaussian bumps with random centers, widths and phases.
Field random_smooth_field(const Grid& grid, Rng& rng);

/// Coefficient driving the integrator, and the one defining Gamma(t) for J and w.
DispersionSchedule dynamics_schedule(const RunConfig& config);
DispersionSchedule frame_schedule(const RunConfig& config);

struct ResidualPoint {
  double t = 0.0;
  double w_residual = 0.0;  // profile-grid sup of w - e^{i|W|^2 log t/2<gamma>} W
  double u_residual = 0.0;  // spatial sup of u - asymptotic_field
};

struct RunResult {
  RunConfig config;
  NormSeries norms;
  std::unique_ptr<ScatteringTracker> tracker;
  std::optional<ScatteringProfile> profile;
  std::vector<Field> dyadic_snapshots;  // u at T0 * 2^k
  std::vector<Field> checkpoint_fields;
  std::vector<ResidualPoint> residuals;
  std::optional<Field> final_field;
  double mass_drift = 0.0;
  std::size_t step_count = 0;
  bool truncated = false;
  std::optional<ErrorCode> error_code;
  std::string error;
};

/// Evolves, records norms on the observation lattice, tracks the gauge from T0
/// on and extracts the profile. Solver aborts leave a truncated result with the
/// error recorded instead of throwing.
RunResult run_simulation(const RunConfig& config);

/// Decay fit of ||u||_inf over [fit_t_min, t_max]; empty when the data do not allow one.
std::optional<PowerFit> decay_fit(const NormSeries& series, double t_min, double t_max);

nlohmann::json run_summary(const RunResult& result);
nlohmann::json profile_meta(const RunResult& result);

/// Writes norms.csv, profile.json, residuals.csv, run.json and snapshots/ into dir.
void write_run_outputs(const RunResult& result, const std::string& dir);

struct IdentityReport {
  std::size_t cases = 0;
  double factorization = 0.0;  // max relative sup error of M D F M against e^{ia Delta}
  double commutation = 0.0;
  double chain_rule = 0.0;
};

/// Randomized operator-identity corpus on a (L = 60, N = 4096) grid.
IdentityReport verify_identities(std::uint64_t seed, std::size_t count, const DispersionMap& map);
nlohmann::json to_json(const IdentityReport& report);

/// Runs the managed, standard and averaged models from the same data.
nlohmann::json compare_solvers(const RunConfig& config);

}  // namespace dmnls
