// fvpnet command-line runner. Links only the C interface.
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fvpnet/fvpnet.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct ScenarioDeleter {
  void operator()(fvp_scenario* s) const { fvp_scenario_free(s); }
};
struct TrajectoryDeleter {
  void operator()(fvp_trajectory* t) const { fvp_trajectory_free(t); }
};
struct ReportsDeleter {
  void operator()(fvp_reports* r) const { fvp_reports_free(r); }
};
struct CurveDeleter {
  void operator()(fvp_curve* c) const { fvp_curve_free(c); }
};
using ScenarioPtr = std::unique_ptr<fvp_scenario, ScenarioDeleter>;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> horizon;
  std::string out;
  std::size_t runs = 50;
  std::string variant = "cucker";
  bool dump_mixing = false;
  bool no_plots = false;
  std::string csv;
};

int report(fvp_status status) {
  std::cerr << "fvpnet: " << fvp_last_error() << '\n';
  switch (status) {
    case FVP_ERR_CONFIG:
    case FVP_ERR_INVALID_ARGUMENT: return kExitConfig;
    case FVP_ERR_CHECK_FAILED: return kExitCheckFailed;
    default: return kExitRuntime;
  }
}

std::size_t thread_cap() {
  const char* env = std::getenv("FVPNET_THREADS");
  if (!env || !*env) return 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0' || v == 0) {
    std::cerr << "fvpnet: ignoring FVPNET_THREADS='" << env << "'\n";
    return 0;
  }
  return static_cast<std::size_t>(v);
}

// Loads the scenario and applies the --seed / --horizon / --dump-mixing overrides.
fvp_status load(const Options& o, ScenarioPtr& out) {
  fvp_scenario* raw = nullptr;
  fvp_status st = fvp_scenario_from_file(o.config.c_str(), &raw);
  if (st != FVP_OK) return st;
  out.reset(raw);
  if (o.seed && (st = fvp_scenario_set_seed(raw, *o.seed)) != FVP_OK) return st;
  if (o.horizon && (st = fvp_scenario_set_horizon(raw, *o.horizon)) != FVP_OK) return st;
  if (o.dump_mixing && (st = fvp_scenario_set_dump_mixing(raw, 1)) != FVP_OK) return st;
  return FVP_OK;
}

std::string out_dir(const Options& o, const fvp_scenario* s) { return o.out.empty() ? fvp_scenario_output_dir(s) : o.out; }

int run_and_write(const Options& o, fvp_scenario* s, bool plots) {
  fvp_trajectory* raw = nullptr;
  fvp_status st = fvp_run(s, &raw);
  if (st != FVP_OK) return report(st);
  std::unique_ptr<fvp_trajectory, TrajectoryDeleter> traj(raw);
  const std::string dir = out_dir(o, s);
  if ((st = fvp_trajectory_write(raw, s, dir.c_str(), plots ? 1 : 0)) != FVP_OK) return report(st);

  std::size_t agents = 0, dim = 0;
  fvp_scenario_shape(s, &agents, &dim);
  std::vector<double> x(agents * dim), ref(dim);
  fvp_trajectory_final_state(raw, x.data(), x.size());
  fvp_scenario_reference(s, ref.data(), ref.size());
  const std::size_t n = fvp_trajectory_length(raw);
  double e0 = 0.0, eT = 0.0, rT = 0.0;
  fvp_trajectory_error(raw, 0, &e0);
  fvp_trajectory_error(raw, n - 1, &eT);
  fvp_trajectory_residual(raw, n - 1, &rT);

  std::printf("steps      %zu\n", n - 1);
  std::printf("e_0        %.6g\n", e0);
  std::printf("e_T        %.6g\n", eT);
  std::printf("r_T        %.6g\n", rT);
  std::printf("mean x_T  ");
  for (std::size_t k = 0; k < dim; ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < agents; ++i) sum += x[i * dim + k];
    std::printf(" %.5f", sum / static_cast<double>(agents));
  }
  std::printf("\nreference ");
  for (double v : ref) std::printf(" %.5f", v);
  std::printf("\nwrote      %s\n", dir.c_str());
  return kExitOk;
}

int cmd_run(const Options& o) {
  ScenarioPtr s;
  if (fvp_status st = load(o, s); st != FVP_OK) return report(st);
  return run_and_write(o, s.get(), fvp_scenario_plots(s.get()) && !o.no_plots);
}

int cmd_example1(const Options& o) {
  const fvp_variant variant = o.variant == "log" ? FVP_VARIANT_LOG : FVP_VARIANT_CUCKER;
  fvp_scenario* raw = nullptr;
  fvp_status st = fvp_scenario_example1(variant, o.seed.value_or(1), o.horizon.value_or(20000), &raw);
  if (st != FVP_OK) return report(st);
  ScenarioPtr s(raw);
  if (o.dump_mixing) fvp_scenario_set_dump_mixing(raw, 1);
  Options local = o;
  if (local.out.empty()) local.out = "out/example1_" + o.variant;
  return run_and_write(local, raw, !o.no_plots);
}

int cmd_check(const Options& o) {
  ScenarioPtr s;
  if (fvp_status st = load(o, s); st != FVP_OK) return report(st);
  fvp_reports* raw = nullptr;
  const fvp_status st = fvp_check(s.get(), &raw);
  if (st != FVP_OK && st != FVP_ERR_CHECK_FAILED) return report(st);
  std::unique_ptr<fvp_reports, ReportsDeleter> reports(raw);
  std::fputs(fvp_reports_text(raw), stdout);
  if (!o.out.empty()) {
    if (fvp_status w = fvp_reports_write(raw, o.out.c_str()); w != FVP_OK) return report(w);
  }
  return st == FVP_OK ? kExitOk : kExitCheckFailed;
}

int cmd_mc(const Options& o) {
  ScenarioPtr s;
  Options local = o;
  local.horizon.reset();  // the Monte-Carlo horizon is passed separately
  if (fvp_status st = load(local, s); st != FVP_OK) return report(st);
  const std::size_t horizon = o.horizon.value_or(10000);
  fvp_curve* raw = nullptr;
  fvp_status st = fvp_mc(s.get(), o.runs, horizon, thread_cap(), &raw);
  if (st != FVP_OK) return report(st);
  std::unique_ptr<fvp_curve, CurveDeleter> curve(raw);
  const std::string dir = out_dir(o, s.get());
  if ((st = fvp_curve_write(raw, dir.c_str(), fvp_scenario_plots(s.get()) && !o.no_plots)) != FVP_OK)
    return report(st);
  for (std::size_t t = 1; t <= horizon; t *= 10) {
    double mean = 0.0, hw = 0.0;
    fvp_curve_value(raw, t, &mean, &hw);
    std::printf("t=%-8zu mean square %.6g +/- %.3g\n", t, mean, hw);
  }
  std::printf("wrote %s\n", dir.c_str());
  return kExitOk;
}

int cmd_plot(const Options& o) {
  const std::string dir = o.out.empty() ? "." : o.out;
  if (fvp_status st = fvp_render_plots(o.csv.c_str(), dir.c_str()); st != FVP_OK) return report(st);
  std::printf("wrote %s\n", dir.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed optimization over random state-dependent networks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(fvp_version()));
  Options o;

  auto add_common = [&o](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", o.config, "Scenario file")->check(CLI::ExistingFile);
    if (config_required) c->required();
    sub->add_option("--seed", o.seed, "Override algo.seed");
    sub->add_option("--horizon", o.horizon, "Override the number of iterations");
    sub->add_option("--out", o.out, "Output directory");
  };

  auto* run = app.add_subcommand("run", "Run a scenario and write trajectory/metrics CSVs and plots");
  add_common(run, true);
  run->add_flag("--dump-mixing", o.dump_mixing, "Also write the mixing matrix at each recorded step");
  run->add_flag("--no-plots", o.no_plots, "Skip SVG output");

  auto* check = app.add_subcommand("check", "Run the property checks selected in the scenario");
  add_common(check, true);

  auto* mc = app.add_subcommand("mc", "Monte-Carlo mean-square study");
  add_common(mc, true);
  mc->add_option("--runs", o.runs, "Number of independent runs")->check(CLI::PositiveNumber);
  mc->add_flag("--no-plots", o.no_plots, "Skip SVG output");

  auto* ex1 = app.add_subcommand("example1", "The 20-robot line-graph scenario");
  ex1->add_option("--variant", o.variant, "Weight model")->check(CLI::IsMember({"cucker", "log"}));
  ex1->add_option("--seed", o.seed, "Random seed (default 1)");
  ex1->add_option("--horizon", o.horizon, "Iterations (default 20000)");
  ex1->add_option("--out", o.out, "Output directory (default out/example1_<variant>)");
  ex1->add_flag("--dump-mixing", o.dump_mixing, "Also write the mixing matrix at each recorded step");
  ex1->add_flag("--no-plots", o.no_plots, "Skip SVG output");

  auto* plot = app.add_subcommand("plot", "Regenerate SVG figures from a trajectory CSV");
  plot->add_option("--csv", o.csv, "trajectory.csv")->required()->check(CLI::ExistingFile);
  plot->add_option("--out", o.out, "Output directory (default .)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (*run) return cmd_run(o);
  if (*check) return cmd_check(o);
  if (*mc) return cmd_mc(o);
  if (*ex1) return cmd_example1(o);
  if (*plot) return cmd_plot(o);
  return kExitConfig;
}
