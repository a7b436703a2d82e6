#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "dmnls/config.hpp"
#include "dmnls/error.hpp"
#include "dmnls/fit.hpp"
#include "dmnls/io.hpp"
#include "dmnls/run.hpp"

using namespace dmnls;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dmnls_harness_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

RunConfig small_config() {
  RunConfig c;
  c.half_width = 256.0;
  c.grid_size = 2048;
  c.dt = 0.01;
  c.t_max = 40.0;
  c.window_start = 20.0;
  c.window_end = 40.0;
  c.profile_points = 256;
  c.fit_t_min = 20.0;
  c.checkpoints = {20.0, 30.0};
  return c;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = RunConfig::parse("# comment\ngamma_plus = 3\n  epsilon=0.05  # trailing\nsolver = gt\ncheckpoints = 25, 50\n\n");
  CHECK(c.gamma_plus == 3.0);
  CHECK(c.epsilon == 0.05);
  CHECK(c.solver == SolverKind::Gt);
  CHECK(c.checkpoints == std::vector<double>{25.0, 50.0});
  CHECK(c.gamma_minus == 1.0);

  CHECK_THROWS_AS(RunConfig::parse("gamma_plus = 3\ngamma_plus = 4\n"), Error);
  CHECK_THROWS_AS(RunConfig::parse("colour = red\n"), Error);
  CHECK_THROWS_AS(RunConfig::parse("epsilon = abc\n"), Error);
  CHECK_THROWS_AS(RunConfig::parse("epsilon\n"), Error);
  try {
    RunConfig::parse("bogus = 1\n");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Config);
  }
}

TEST_CASE("config round trip and validation") {
  RunConfig c = small_config();
  c.family = DataFamily::DoubleBump;
  c.dealias = true;
  c.seed = 12345678901234ull;
  const RunConfig back = RunConfig::parse(c.to_text());
  CHECK(back.to_text() == c.to_text());
  for (const auto& key : RunConfig::keys()) CHECK(back.get(key) == c.get(key));
  CHECK_NOTHROW(c.validate());

  RunConfig bad = small_config();
  bad.grid_size = 3000;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = small_config();
  bad.dt = 0.3;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = small_config();
  bad.t_max = 10.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = small_config();
  bad.epsilon = -1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = small_config();
  bad.gamma_minus = 5.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK_THROWS_AS(RunConfig::load("/nonexistent/dmnls.cfg"), Error);
}

TEST_CASE("power-law fits") {
  std::vector<double> t, y, z;
  for (int i = 1; i <= 100; ++i) {
    t.push_back(i);
    y.push_back(1.0 / std::sqrt(i));
    z.push_back(3.0 * std::pow(i, -0.75));
  }
  const auto a = fit_power_law(t, y, 1.0);
  CHECK(a.slope == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(a.r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a.samples == 100);
  const auto b = fit_power_law(t, z, 1.0);
  CHECK(b.slope == doctest::Approx(-0.75).epsilon(1e-12));
  CHECK(b.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(fit_power_law(t, y, 20.0, 40.0).samples == 21);

  std::mt19937_64 gen(2024);
  std::normal_distribution<double> noise(0.0, 0.01);
  std::vector<double> tn, yn;
  for (int i = 0; i < 701; ++i) {
    tn.push_back(50.0 + 0.5 * i);
    yn.push_back(std::pow(tn.back(), -0.5) * (1.0 + noise(gen)));
  }
  const auto n = fit_power_law(tn, yn, 50.0);
  CHECK(n.slope >= -0.52);
  CHECK(n.slope <= -0.48);

  y[40] = 0.0;
  CHECK_THROWS_AS(fit_power_law(t, y, 1.0), Error);
  CHECK_THROWS_AS(fit_power_law(t, z, 95.0), Error);
}

TEST_CASE("log-phase fit separates the 1/Gamma term") {
  const DispersionMap map(2.0, 1.0);
  std::vector<double> t, phase, gamma;
  for (int i = 0; i <= 800; ++i) {
    t.push_back(16.0 + 0.5 * i);
    gamma.push_back(map.total(t.back()));
    phase.push_back(0.7 + 0.0087 * std::log(t.back()) + 0.25 / gamma.back());
  }
  const auto f = fit_log_phase(t, phase, gamma, 50.0);
  CHECK(f.slope == doctest::Approx(0.0087).epsilon(1e-9));
  CHECK(f.correction == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(f.offset == doctest::Approx(0.7).epsilon(1e-9));
  CHECK(f.r2 == doctest::Approx(1.0));
  CHECK(f.samples == 733);
  CHECK_THROWS_AS(fit_log_phase(t, phase, gamma, 1e6), Error);
}

TEST_CASE("snapshot and csv io") {
  const auto dir = scratch("io");
  const Grid g(12.5, 64);
  const Field f = Field::sample(g, 3.25, [](double x) { return cplx(std::sin(x), 1.0 / (1.0 + x * x)); });
  write_snapshot((dir / "f.bin").string(), f);
  CHECK(fs::file_size(dir / "f.bin") == 8 + 3 * 8 + 64 * 16);
  const Field back = read_snapshot((dir / "f.bin").string());
  CHECK(back.grid == g);
  CHECK(back.time == 3.25);
  CHECK(back.values == f.values);

  const std::string text = read_text((dir / "f.bin").string());
  CHECK(text.substr(0, 8) == std::string("DMNLS1\0\0", 8));
  write_text((dir / "junk.bin").string(), "not a snapshot");
  CHECK_THROWS_AS(read_snapshot((dir / "junk.bin").string()), Error);
  CHECK_THROWS_AS(read_snapshot((dir / "missing.bin").string()), Error);

  NormSeries s;
  s.append({0.0, 1.0, 0.5, 0.25, 0.125});
  s.append({0.5, 1.0 / 3.0, 0.1, 0.2, 0.3});
  const std::string csv = norms_csv(s);
  CHECK(csv.substr(0, csv.find('\n')) == kNormsHeader);
  write_norms_csv((dir / "norms.csv").string(), s);
  const NormSeries r = read_norms_csv((dir / "norms.csv").string());
  REQUIRE(r.size() == 2);
  CHECK(r.samples()[1].mass == 1.0 / 3.0);
  CHECK(r.samples()[1].sup == 0.3);
}

TEST_CASE("zero data give zero outputs") {
  RunConfig c = small_config();
  c.epsilon = 0.0;
  const RunResult r = run_simulation(c);
  CHECK_FALSE(r.truncated);
  REQUIRE(r.norms.size() == 81);
  for (const auto& s : r.norms.samples()) {
    CHECK(s.mass == 0.0);
    CHECK(s.grad == 0.0);
    CHECK(s.jnorm == 0.0);
    CHECK(s.sup == 0.0);
  }
  REQUIRE(r.profile);
  for (const auto& w : r.profile->W) CHECK(w == cplx(0.0));
}

TEST_CASE("linear-mode run matches the Gaussian oracle") {
  RunConfig c = small_config();
  c.nonlinearity = 0.0;
  c.epsilon = 0.1;
  const RunResult r = run_simulation(c);
  REQUIRE(r.final_field);
  const double a = c.map().total(c.t_max);
  const double amp = 0.1 / (1.0 + std::sqrt(2.0)) * std::pow(M_PI, -0.25);
  double err = 0.0;
  for (std::size_t j = 0; j < r.final_field->size(); ++j) {
    const double x = r.final_field->grid.x(j);
    const cplx q(1.0, 2.0 * a);
    err = std::max(err, std::abs(r.final_field->values[j] - amp * std::exp(-x * x / (2.0 * q)) / std::sqrt(q)));
  }
  CHECK(err < 1e-6 * amp);
}

TEST_CASE("runs are deterministic and write the documented artifacts") {
  RunConfig c = small_config();
  c.family = DataFamily::Random;
  c.seed = 9;
  const auto d1 = scratch("det1");
  const auto d2 = scratch("det2");
  write_run_outputs(run_simulation(c), d1.string());
  write_run_outputs(run_simulation(c), d2.string());
  for (const char* f : {"norms.csv", "profile.json", "residuals.csv", "run.json", "snapshots/final.bin",
                        "snapshots/field_t00016.0000.bin", "snapshots/field_t00032.0000.bin"}) {
    CAPTURE(f);
    REQUIRE(fs::exists(d1 / f));
    CHECK(read_text((d1 / f).string()) == read_text((d2 / f).string()));
  }
  const auto profile = nlohmann::json::parse(read_text((d1 / "profile.json").string()));
  for (const char* key : {"xi", "W0_re", "W0_im", "Phi", "W_re", "W_im", "meta"}) CHECK(profile.contains(key));
  CHECK(profile["xi"].size() == 256);
  const auto back = profile_from_json(profile);
  CHECK(back.W.size() == 256);
  CHECK(read_text((d1 / "residuals.csv").string()).rfind("t,w_residual,u_residual\n", 0) == 0);
  const auto run = nlohmann::json::parse(read_text((d1 / "run.json").string()));
  CHECK(run["truncated"] == false);
}

TEST_CASE("solver aborts leave a truncated result") {
  RunConfig c = small_config();
  c.half_width = 40.0;
  c.grid_size = 512;
  const RunResult r = run_simulation(c);
  CHECK(r.truncated);
  REQUIRE(r.error_code);
  CHECK(*r.error_code == ErrorCode::Wraparound);
  CHECK_FALSE(r.profile);
  CHECK(run_summary(r)["truncated"] == true);
}

TEST_CASE("initial data families are Sigma-normalized") {
  RunConfig c = small_config();
  for (auto fam : {DataFamily::Gaussian, DataFamily::ChirpedGaussian, DataFamily::DoubleBump, DataFamily::Random}) {
    c.family = fam;
    CHECK(sigma_norm(initial_data(c)) == doctest::Approx(c.epsilon).epsilon(1e-10));
  }
  Rng a(5), b(5);
  for (int i = 0; i < 10; ++i) CHECK(a.next() == b.next());
}

TEST_CASE("solver comparison: degenerate cases") {
  RunConfig c = small_config();
  c.constant_dispersion = true;
  c.dt = 0.02;
  c.gt_nodes = 4;
  const auto report = compare_solvers(c);
  CHECK(report["dmnls_enabled"] == false);
  CHECK_FALSE(report["models"].contains("dmnls"));
  const double d = report["pairs"]["standard_vs_gt"]["final_sup_diff"].get<double>();
  CHECK(d < 1e-6);

  c.epsilon = 0.0;
  c.constant_dispersion = false;
  const auto zero = compare_solvers(c);
  for (const auto& [name, pair] : zero["pairs"].items()) {
    CAPTURE(name);
    CHECK(pair["final_sup_diff"].get<double>() == 0.0);
  }
  for (const auto& [name, model] : zero["models"].items()) {
    for (const auto& w : model["W_abs"]) CHECK(w.get<double>() == 0.0);
  }
}

TEST_CASE("identity corpus") {
  const auto report = verify_identities(3, 4, DispersionMap(2.0, 1.0));
  CHECK(report.cases == 4);
  CHECK(report.factorization < 1e-6);
  CHECK(report.commutation < 1e-6);
  CHECK(report.chain_rule < 1e-6);
}
