#include "fvpnet/suite.hpp"

#include <algorithm>

#include "fvpnet/output.hpp"

namespace fvpnet {

namespace {

bool selected(const CheckSelection& sel, const std::string& name) {
  return sel.names.empty() || std::find(sel.names.begin(), sel.names.end(), name) != sel.names.end();
}

}  // namespace

std::vector<CheckReport> run_checks(const ScenarioConfig& config) {
  const Scenario& sc = config.scenario;
  const CheckSelection& sel = config.checks;
  const std::uint64_t seed = sc.algo.seed;
  CheckOptions opts;
  opts.samples = sel.samples;
  opts.state_scale = sel.state_scale;

  std::vector<CheckReport> reports;
  std::uint64_t stream = 100;
  auto rng_for = [&] { return Rng(Rng::substream(seed, stream++)); };

  if (selected(sel, "doubly_stochastic")) {
    Rng rng = rng_for();
    reports.push_back(check_doubly_stochastic(config.graph_set, sc.weight, rng, opts));
  }
  if (selected(sel, "norm_bound")) {
    Rng rng = rng_for();
    reports.push_back(check_norm_bound(config.graph_set, sc.weight, rng, opts));
  }
  if (selected(sel, "fixed_value_points")) {
    Rng rng = rng_for();
    reports.push_back(check_fixed_value_points(config.graph_set, sc.weight, rng, opts));
  }
  if (selected(sel, "quasi_nonexpansive")) {
    Rng rng = rng_for();
    reports.push_back(check_quasi_nonexpansive(config.graph_set, sc.weight, rng, opts));
  }
  if (selected(sel, "lemma4")) {
    std::vector<double> etas = sel.etas.empty() ? std::vector<double>{sc.algo.eta} : sel.etas;
    for (double eta : etas) {
      Rng rng = rng_for();
      Lemma4Report r = check_lemma4(config.graph_set, sc.weight, eta, rng, opts);
      const std::string suffix = " (eta=" + format_number(eta) + ")";
      for (CheckReport* part : {&r.fixed_points, &r.inner_product, &r.quasi_nonexpansive}) {
        part->name += suffix;
        reports.push_back(std::move(*part));
      }
    }
  }
  if (selected(sel, "connectivity")) {
    Rng rng = rng_for();
    ConnectivityReport c =
        check_union_connectivity(config.graph_set, sc.weight, sel.connectivity_states, rng, sel.state_scale);
    CheckReport r = c.spectral;
    r.name = "connectivity";
    r.passed = c.passed();
    reports.push_back(std::move(r));
  }
  if (selected(sel, "contraction")) {
    Rng rng = rng_for();
    ContractionReport c = check_contraction(*sc.objective, sc.algo.beta, rng, sel.samples, sel.state_scale);
    reports.push_back(std::move(c.report));
  }
  if (selected(sel, "constants")) {
    Rng rng = rng_for();
    const ConstantProbe p = probe_constants(*sc.objective, sel.samples, rng, sel.state_scale);
    CheckReport r;
    r.name = "constants";
    r.samples = p.pairs;
    r.violations = p.consistent ? 0 : 1;
    r.worst_margin = std::min(p.rho_hat - sc.objective->rho(), sc.objective->lipschitz() - p.k_hat);
    r.tolerance = 1e-9;
    r.passed = p.consistent;
    r.detail = "rho_hat " + format_number(p.rho_hat) + ", K_hat " + format_number(p.k_hat) + ", declared rho " +
               format_number(sc.objective->rho()) + ", K " + format_number(sc.objective->lipschitz());
    reports.push_back(std::move(r));
  }
  if (selected(sel, "occurrence")) {
    GraphProcess process(sc.topology, sc.process, splitmix64(seed + stream++));
    reports.push_back(check_occurrence(process, sel.occurrence_steps, config.graph_set));
  }
  if (selected(sel, "boundedness")) reports.push_back(check_boundedness(sc));
  return reports;
}

std::vector<std::pair<std::size_t, MixingMatrix>> collect_mixing(const Scenario& scenario) {
  std::vector<std::pair<std::size_t, MixingMatrix>> out;
  const std::size_t every = scenario.algo.record_every;
  run(scenario, [&](std::size_t t, const StackedState& x, const GraphSample& sample) {
    if (t % every == 0 || t == scenario.algo.horizon)
      out.emplace_back(t, build_mixing_matrix(scenario.topology, sample.active, scenario.weight, x));
  });
  return out;
}

ScenarioConfig example1_config(Example1Variant variant, std::uint64_t seed, std::size_t horizon) {
  ScenarioConfig cfg;
  cfg.scenario = example1_scenario(variant, seed, horizon);
  cfg.graph_set = single_link_graph_set(cfg.scenario.topology);
  cfg.source = variant == Example1Variant::Cucker ? "example1 (cucker)" : "example1 (log)";
  return cfg;
}

}  // namespace fvpnet
