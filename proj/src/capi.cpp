#include "fvpnet/fvpnet.h"

#include <algorithm>
#include <exception>
#include <filesystem>
#include <memory>
#include <new>
#include <string>
#include <thread>

#include "fvpnet/config.hpp"
#include "fvpnet/errors.hpp"
#include "fvpnet/output.hpp"
#include "fvpnet/suite.hpp"

struct fvp_scenario {
  fvpnet::ScenarioConfig config;
  std::string output_dir;
};

struct fvp_trajectory {
  fvpnet::Trajectory trajectory;
};

struct fvp_reports {
  std::vector<fvpnet::CheckReport> reports;
  std::string text;
};

struct fvp_curve {
  fvpnet::MeanSquareCurve curve;
};

namespace {

thread_local std::string g_last_error;

fvp_status fail(fvp_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

// Maps the exception in flight to a status code.
fvp_status translate() {
  try {
    throw;
  } catch (const fvpnet::ConfigError& e) {
    return fail(FVP_ERR_CONFIG, e.what());
  } catch (const fvpnet::IoError& e) {
    return fail(FVP_ERR_IO, e.what());
  } catch (const fvpnet::NumericError& e) {
    return fail(FVP_ERR_NUMERIC, e.what());
  } catch (const fvpnet::InvalidInput& e) {
    return fail(FVP_ERR_INVALID_ARGUMENT, e.what());
  } catch (const fvpnet::AssumptionViolation& e) {
    return fail(FVP_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(FVP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(FVP_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(FVP_ERR_INTERNAL, "unknown error");
  }
}

template <typename F>
fvp_status guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (...) {
    return translate();
  }
}

fvp_status null_arg(const char* what) { return fail(FVP_ERR_NULL, std::string(what) + " is null"); }

// Re-validates after a mutation so the scenario never holds an invalid state.
fvp_status revalidate(fvp_scenario* s) {
  fvpnet::validate_scenario(s->config.scenario);
  return FVP_OK;
}

}  // namespace

extern "C" {

const char* fvp_version(void) { return "1.0.0"; }

const char* fvp_last_error(void) { return g_last_error.c_str(); }

fvp_status fvp_scenario_from_file(const char* path, fvp_scenario** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    auto s = std::make_unique<fvp_scenario>();
    s->config = fvpnet::parse_config(path);
    s->output_dir = s->config.output.dir.string();
    *out = s.release();
    return FVP_OK;
  });
}

fvp_status fvp_scenario_from_string(const char* text, const char* base_dir, fvp_scenario** out) {
  if (!text) return null_arg("text");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    auto s = std::make_unique<fvp_scenario>();
    s->config = fvpnet::parse_config_text(text, "<string>", base_dir ? base_dir : ".");
    s->output_dir = s->config.output.dir.string();
    *out = s.release();
    return FVP_OK;
  });
}

fvp_status fvp_scenario_example1(fvp_variant variant, uint64_t seed, size_t horizon, fvp_scenario** out) {
  if (!out) return null_arg("out");
  *out = nullptr;
  if (variant != FVP_VARIANT_CUCKER && variant != FVP_VARIANT_LOG)
    return fail(FVP_ERR_INVALID_ARGUMENT, "unknown variant");
  return guarded([&] {
    auto s = std::make_unique<fvp_scenario>();
    s->config = fvpnet::example1_config(
        variant == FVP_VARIANT_LOG ? fvpnet::Example1Variant::Log : fvpnet::Example1Variant::Cucker, seed, horizon);
    s->output_dir = s->config.output.dir.string();
    *out = s.release();
    return FVP_OK;
  });
}

fvp_status fvp_scenario_set_seed(fvp_scenario* s, uint64_t seed) {
  if (!s) return null_arg("scenario");
  s->config.scenario.algo.seed = seed;
  return FVP_OK;
}

fvp_status fvp_scenario_set_horizon(fvp_scenario* s, size_t horizon) {
  if (!s) return null_arg("scenario");
  if (horizon == 0) return fail(FVP_ERR_INVALID_ARGUMENT, "horizon must be at least 1");
  return guarded([&] {
    s->config.scenario.algo.horizon = horizon;
    return revalidate(s);
  });
}

fvp_status fvp_scenario_set_dump_mixing(fvp_scenario* s, int enabled) {
  if (!s) return null_arg("scenario");
  s->config.output.dump_mixing = enabled != 0;
  return FVP_OK;
}

fvp_status fvp_scenario_shape(const fvp_scenario* s, size_t* agents, size_t* dim) {
  if (!s) return null_arg("scenario");
  if (agents) *agents = s->config.scenario.x0.agents();
  if (dim) *dim = s->config.scenario.x0.dim();
  return FVP_OK;
}

fvp_status fvp_scenario_reference(const fvp_scenario* s, double* out, size_t len) {
  if (!s) return null_arg("scenario");
  if (!out && len > 0) return null_arg("out");
  const auto& ref = s->config.scenario.reference;
  std::copy_n(ref.begin(), std::min(len, ref.size()), out);
  return FVP_OK;
}

const char* fvp_scenario_output_dir(const fvp_scenario* s) { return s ? s->output_dir.c_str() : ""; }

int fvp_scenario_plots(const fvp_scenario* s) { return s && s->config.output.plots ? 1 : 0; }

void fvp_scenario_free(fvp_scenario* s) { delete s; }

fvp_status fvp_run(const fvp_scenario* s, fvp_trajectory** out) {
  if (!s) return null_arg("scenario");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    auto t = std::make_unique<fvp_trajectory>();
    t->trajectory = fvpnet::run(s->config.scenario);
    *out = t.release();
    return FVP_OK;
  });
}

size_t fvp_trajectory_length(const fvp_trajectory* t) { return t ? t->trajectory.steps.size() : 0; }

fvp_status fvp_trajectory_error(const fvp_trajectory* t, size_t index, double* out) {
  if (!t) return null_arg("trajectory");
  if (!out) return null_arg("out");
  if (index >= t->trajectory.steps.size()) return fail(FVP_ERR_INVALID_ARGUMENT, "index out of range");
  *out = t->trajectory.steps[index].error;
  return FVP_OK;
}

fvp_status fvp_trajectory_residual(const fvp_trajectory* t, size_t index, double* out) {
  if (!t) return null_arg("trajectory");
  if (!out) return null_arg("out");
  if (index >= t->trajectory.steps.size()) return fail(FVP_ERR_INVALID_ARGUMENT, "index out of range");
  *out = t->trajectory.steps[index].residual;
  return FVP_OK;
}

fvp_status fvp_trajectory_final_state(const fvp_trajectory* t, double* out, size_t len) {
  if (!t) return null_arg("trajectory");
  if (!out && len > 0) return null_arg("out");
  const auto values = t->trajectory.terminal.values();
  std::copy_n(values.begin(), std::min(len, values.size()), out);
  return FVP_OK;
}

fvp_status fvp_trajectory_write(const fvp_trajectory* t, const fvp_scenario* s, const char* dir, int plots) {
  if (!t) return null_arg("trajectory");
  if (!s) return null_arg("scenario");
  if (!dir) return null_arg("dir");
  return guarded([&] {
    const std::filesystem::path out_dir(dir);
    const std::string csv = fvpnet::trajectory_csv(t->trajectory, s->config.output.states);
    fvpnet::write_file_atomic(out_dir / "trajectory.csv", csv);
    fvpnet::write_file_atomic(out_dir / "metrics.csv", fvpnet::metrics_csv(s->config.scenario, t->trajectory));
    if (s->config.output.dump_mixing)
      fvpnet::write_file_atomic(out_dir / "mixing.csv",
                                fvpnet::mixing_csv(fvpnet::collect_mixing(s->config.scenario)));
    if (plots) fvpnet::render_trajectory_plots(fvpnet::parse_csv(csv), out_dir);
    return FVP_OK;
  });
}

void fvp_trajectory_free(fvp_trajectory* t) { delete t; }

fvp_status fvp_check(const fvp_scenario* s, fvp_reports** out) {
  if (!s) return null_arg("scenario");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    auto r = std::make_unique<fvp_reports>();
    r->reports = fvpnet::run_checks(s->config);
    r->text = fvpnet::reports_text(r->reports);
    const bool ok = std::all_of(r->reports.begin(), r->reports.end(), [](const auto& c) { return c.passed; });
    *out = r.release();
    return ok ? FVP_OK : fail(FVP_ERR_CHECK_FAILED, "one or more checks failed");
  });
}

size_t fvp_reports_count(const fvp_reports* r) { return r ? r->reports.size() : 0; }

const char* fvp_reports_name(const fvp_reports* r, size_t index) {
  return r && index < r->reports.size() ? r->reports[index].name.c_str() : "";
}

int fvp_reports_passed(const fvp_reports* r, size_t index) {
  return r && index < r->reports.size() && r->reports[index].passed ? 1 : 0;
}

double fvp_reports_worst_margin(const fvp_reports* r, size_t index) {
  return r && index < r->reports.size() ? r->reports[index].worst_margin : 0.0;
}

const char* fvp_reports_text(const fvp_reports* r) { return r ? r->text.c_str() : ""; }

fvp_status fvp_reports_write(const fvp_reports* r, const char* dir) {
  if (!r) return null_arg("reports");
  if (!dir) return null_arg("dir");
  return guarded([&] {
    const std::filesystem::path out_dir(dir);
    fvpnet::write_file_atomic(out_dir / "checks.csv", fvpnet::reports_csv(r->reports));
    fvpnet::write_file_atomic(out_dir / "checks.txt", r->text);
    return FVP_OK;
  });
}

void fvp_reports_free(fvp_reports* r) { delete r; }

fvp_status fvp_mc(const fvp_scenario* s, size_t runs, size_t horizon, size_t threads, fvp_curve** out) {
  if (!s) return null_arg("scenario");
  if (!out) return null_arg("out");
  *out = nullptr;
  if (runs < 2) return fail(FVP_ERR_INVALID_ARGUMENT, "Monte-Carlo needs at least 2 runs");
  if (horizon == 0) return fail(FVP_ERR_INVALID_ARGUMENT, "horizon must be at least 1");
  return guarded([&] {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    auto c = std::make_unique<fvp_curve>();
    c->curve = fvpnet::monte_carlo_mean_square(s->config.scenario, runs, horizon, threads);
    *out = c.release();
    return FVP_OK;
  });
}

size_t fvp_curve_length(const fvp_curve* c) { return c ? c->curve.mean.size() : 0; }

fvp_status fvp_curve_value(const fvp_curve* c, size_t t, double* mean, double* half_width) {
  if (!c) return null_arg("curve");
  if (t >= c->curve.mean.size()) return fail(FVP_ERR_INVALID_ARGUMENT, "index out of range");
  if (mean) *mean = c->curve.mean[t];
  if (half_width) *half_width = c->curve.half_width[t];
  return FVP_OK;
}

fvp_status fvp_curve_write(const fvp_curve* c, const char* dir, int plots) {
  if (!c) return null_arg("curve");
  if (!dir) return null_arg("dir");
  return guarded([&] {
    const std::filesystem::path out_dir(dir);
    const std::string csv = fvpnet::curve_csv(c->curve);
    fvpnet::write_file_atomic(out_dir / "mean_square.csv", csv);
    if (plots) fvpnet::render_curve_plot(fvpnet::parse_csv(csv), out_dir);
    return FVP_OK;
  });
}

void fvp_curve_free(fvp_curve* c) { delete c; }

fvp_status fvp_render_plots(const char* trajectory_csv, const char* dir) {
  if (!trajectory_csv) return null_arg("trajectory_csv");
  if (!dir) return null_arg("dir");
  return guarded([&] {
    fvpnet::render_trajectory_plots(fvpnet::read_csv(trajectory_csv), dir);
    return FVP_OK;
  });
}

}  // extern "C"
