#include "dmnls/dmnls.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "dmnls/config.hpp"
#include "dmnls/error.hpp"
#include "dmnls/fit.hpp"
#include "dmnls/io.hpp"
#include "dmnls/run.hpp"

struct dmnls_config {
  dmnls::RunConfig value;
};

struct dmnls_run {
  dmnls::RunResult value;
};

namespace {

thread_local std::string last_error;

dmnls_status to_status(dmnls::ErrorCode code) {
  switch (code) {
    case dmnls::ErrorCode::InvalidArgument: return DMNLS_ERR_INVALID_ARGUMENT;
    case dmnls::ErrorCode::Config: return DMNLS_ERR_CONFIG;
    case dmnls::ErrorCode::Io: return DMNLS_ERR_IO;
    case dmnls::ErrorCode::Solver: return DMNLS_ERR_SOLVER;
    case dmnls::ErrorCode::Wraparound: return DMNLS_ERR_WRAPAROUND;
  }
  return DMNLS_ERR_INTERNAL;
}

template <typename F>
dmnls_status guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const dmnls::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return DMNLS_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return DMNLS_ERR_INTERNAL;
  }
}

dmnls_status null_argument(const char* what) {
  last_error = std::string("null argument: ") + what;
  return DMNLS_ERR_INVALID_ARGUMENT;
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* dmnls_version(void) { return "1.0.0"; }

const char* dmnls_last_error(void) { return last_error.c_str(); }

const char* dmnls_status_name(dmnls_status status) {
  switch (status) {
    case DMNLS_OK: return "ok";
    case DMNLS_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case DMNLS_ERR_CONFIG: return "config";
    case DMNLS_ERR_IO: return "io";
    case DMNLS_ERR_SOLVER: return "solver";
    case DMNLS_ERR_WRAPAROUND: return "wraparound";
    case DMNLS_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void dmnls_string_free(char* str) { std::free(str); }

dmnls_status dmnls_config_default(dmnls_config** out) {
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    *out = new dmnls_config{};
    return DMNLS_OK;
  });
}

dmnls_status dmnls_config_load(const char* path, dmnls_config** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    *out = new dmnls_config{dmnls::RunConfig::load(path)};
    return DMNLS_OK;
  });
}

dmnls_status dmnls_config_parse(const char* text, dmnls_config** out) {
  if (!text) return null_argument("text");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    *out = new dmnls_config{dmnls::RunConfig::parse(text)};
    return DMNLS_OK;
  });
}

dmnls_status dmnls_config_set(dmnls_config* config, const char* key, const char* value) {
  if (!config) return null_argument("config");
  if (!key || !value) return null_argument("key/value");
  return guarded([&] {
    config->value.set(key, value);
    return DMNLS_OK;
  });
}

dmnls_status dmnls_config_get(const dmnls_config* config, const char* key, char** out) {
  if (!config) return null_argument("config");
  if (!key || !out) return null_argument("key/out");
  return guarded([&] {
    *out = duplicate(config->value.get(key));
    return DMNLS_OK;
  });
}

dmnls_status dmnls_config_to_text(const dmnls_config* config, char** out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = duplicate(config->value.to_text());
    return DMNLS_OK;
  });
}

dmnls_status dmnls_config_validate(const dmnls_config* config) {
  if (!config) return null_argument("config");
  return guarded([&] {
    config->value.validate();
    return DMNLS_OK;
  });
}

void dmnls_config_free(dmnls_config* config) { delete config; }

dmnls_status dmnls_simulate(const dmnls_config* config, dmnls_run** out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    auto* run = new dmnls_run{dmnls::run_simulation(config->value)};
    *out = run;
    if (run->value.error_code) {
      last_error = run->value.error;
      return to_status(*run->value.error_code);
    }
    return DMNLS_OK;
  });
}

int dmnls_run_truncated(const dmnls_run* run) { return run && run->value.truncated ? 1 : 0; }

size_t dmnls_run_observation_count(const dmnls_run* run) { return run ? run->value.norms.size() : 0; }

dmnls_status dmnls_run_norms(const dmnls_run* run, size_t index, double out[DMNLS_NORM_COLUMNS]) {
  if (!run) return null_argument("run");
  if (!out) return null_argument("out");
  return guarded([&] {
    const auto& samples = run->value.norms.samples();
    if (index >= samples.size()) {
      dmnls::fail(dmnls::ErrorCode::InvalidArgument, "observation index out of range");
    }
    const auto running = run->value.norms.running();
    const auto& s = samples[index];
    const double row[DMNLS_NORM_COLUMNS] = {s.t, s.mass, s.grad, s.jnorm, s.sup,
                                            running[index].x, running[index].s};
    std::memcpy(out, row, sizeof row);
    return DMNLS_OK;
  });
}

dmnls_status dmnls_run_summary_json(const dmnls_run* run, char** out) {
  if (!run) return null_argument("run");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = duplicate(dmnls::run_summary(run->value).dump(2));
    return DMNLS_OK;
  });
}

dmnls_status dmnls_run_profile_json(const dmnls_run* run, char** out) {
  if (!run) return null_argument("run");
  if (!out) return null_argument("out");
  return guarded([&] {
    if (!run->value.profile) {
      dmnls::fail(dmnls::ErrorCode::InvalidArgument, "run has no extracted profile");
    }
    *out = duplicate(dmnls::profile_to_json(*run->value.profile, dmnls::profile_meta(run->value)).dump());
    return DMNLS_OK;
  });
}

dmnls_status dmnls_run_write(const dmnls_run* run, const char* directory) {
  if (!run) return null_argument("run");
  if (!directory) return null_argument("directory");
  return guarded([&] {
    dmnls::write_run_outputs(run->value, directory);
    return DMNLS_OK;
  });
}

void dmnls_run_free(dmnls_run* run) { delete run; }

dmnls_status dmnls_fit_power_law(const double* t, const double* y, size_t n, double t_min, double t_max,
                                 double* slope, double* intercept, double* r2) {
  if (!t || !y) return null_argument("t/y");
  return guarded([&] {
    const auto fit = dmnls::fit_power_law({t, n}, {y, n}, t_min, t_max);
    if (slope) *slope = fit.slope;
    if (intercept) *intercept = fit.intercept;
    if (r2) *r2 = fit.r2;
    return DMNLS_OK;
  });
}

dmnls_status dmnls_fit_decay_csv(const char* norms_csv, double t_min, double t_max, char** out_json) {
  if (!norms_csv) return null_argument("norms_csv");
  if (!out_json) return null_argument("out_json");
  return guarded([&] {
    const auto series = dmnls::read_norms_csv(norms_csv);
    std::vector<double> t;
    std::vector<double> y;
    for (const auto& s : series.samples()) {
      t.push_back(s.t);
      y.push_back(s.sup);
    }
    const auto fit = dmnls::fit_power_law(t, y, t_min, t_max);
    const nlohmann::json j = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r2", fit.r2},
                              {"samples", fit.samples}, {"t_min", t_min}, {"t_max", t_max}};
    *out_json = duplicate(j.dump(2));
    return DMNLS_OK;
  });
}

dmnls_status dmnls_verify_identities(const dmnls_config* config, size_t cases, char** out_json) {
  if (!config) return null_argument("config");
  if (!out_json) return null_argument("out_json");
  return guarded([&] {
    const auto report = dmnls::verify_identities(config->value.seed, cases, config->value.map());
    *out_json = duplicate(dmnls::to_json(report).dump(2));
    return DMNLS_OK;
  });
}

dmnls_status dmnls_compare(const dmnls_config* config, char** out_json) {
  if (!config) return null_argument("config");
  if (!out_json) return null_argument("out_json");
  return guarded([&] {
    *out_json = duplicate(dmnls::compare_solvers(config->value).dump(2));
    return DMNLS_OK;
  });
}

dmnls_status dmnls_snapshot_write(const char* path, size_t n, double half_width, double t,
                                  const double* values) {
  if (!path || !values) return null_argument("path/values");
  return guarded([&] {
    dmnls::Field f(dmnls::Grid(half_width, n), t);
    for (size_t j = 0; j < n; ++j) f.values[j] = dmnls::cplx(values[2 * j], values[2 * j + 1]);
    dmnls::write_snapshot(path, f);
    return DMNLS_OK;
  });
}

dmnls_status dmnls_snapshot_read(const char* path, size_t* n, double* half_width, double* t,
                                 double** values) {
  if (!path || !n || !half_width || !t || !values) return null_argument("path/outputs");
  return guarded([&] {
    const auto f = dmnls::read_snapshot(path);
    auto* buf = static_cast<double*>(std::malloc(2 * f.size() * sizeof(double)));
    if (!buf) throw std::bad_alloc();
    for (size_t j = 0; j < f.size(); ++j) {
      buf[2 * j] = f.values[j].real();
      buf[2 * j + 1] = f.values[j].imag();
    }
    *n = f.size();
    *half_width = f.grid.half_width();
    *t = f.time;
    *values = buf;
    return DMNLS_OK;
  });
}

void dmnls_buffer_free(double* values) { std::free(values); }

}  // extern "C"
