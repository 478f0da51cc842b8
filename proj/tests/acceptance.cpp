// Acceptance suite. Prints one PASS/FAIL line per criterion; with a numeric
// argument runs only that criterion. Exit status is nonzero if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fvpnet/analysis.hpp"
#include "fvpnet/output.hpp"

using namespace fvpnet;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, double v) {
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

const std::vector<double> kPaperOptimum = {-0.9002, 0.4111};

Outcome analytic_optimum() {
  const QuadraticObjective q(initial_positions_example1());
  std::vector<double> s;
  double best = 1e9;
  for (int rep = 0; rep < 5; ++rep) {
    const auto start = Clock::now();
    s = analytic_consensus_minimizer(q);
    best = std::min(best, seconds_since(start));
  }
  const double err = std::max(std::abs(s[0] - kPaperOptimum[0]), std::abs(s[1] - kPaperOptimum[1]));
  Outcome o;
  o.passed = err <= 5e-4 && best < 1e-3;
  o.detail = "s* = [" + fmt("%.5f", s[0]) + ", " + fmt("%.5f", s[1]) + "], max deviation " + fmt("%.2e", err) +
             ", " + fmt("%.1f", best * 1e6) + " us";
  return o;
}

Outcome example_convergence() {
  const std::size_t horizon = 20000;
  std::ostringstream detail;
  bool all = true;
  for (Example1Variant v : {Example1Variant::Cucker, Example1Variant::Log}) {
    int good = 0;
    double worst_time = 0.0, worst_dist = 0.0, worst_ratio = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const Scenario s = example1_scenario(v, seed, horizon);
      const auto start = Clock::now();
      const Trajectory tr = run(s);
      const double elapsed = seconds_since(start);
      double dist = 0.0;
      for (std::size_t i = 0; i < tr.terminal.agents(); ++i)
        dist = std::max(dist, distance(tr.terminal.block(i), s.reference));
      const double ratio = tr.steps.back().error / tr.steps.front().error;
      if (dist <= 0.1 && ratio <= 1.0 / 20.0 && elapsed < 10.0) ++good;
      worst_time = std::max(worst_time, elapsed);
      worst_dist = std::max(worst_dist, dist);
      worst_ratio = std::max(worst_ratio, ratio);
    }
    all = all && good >= 4;
    detail << (v == Example1Variant::Cucker ? "cucker" : "log") << " " << good << "/5 seeds"
           << " (max_i |x_i,T - s*| up to " << fmt("%.4f", worst_dist) << ", e_T/e_0 up to "
           << fmt("%.4f", worst_ratio) << ", slowest run " << fmt("%.2f", worst_time) << " s); ";
  }
  Outcome o;
  o.passed = all;
  o.detail = detail.str();
  o.detail.resize(o.detail.size() - 2);
  return o;
}

Outcome quasi_nonexpansive() {
  const GraphSet set = single_link_graph_set(Topology::line(20));
  CheckOptions opts;
  opts.samples = 10000;
  opts.tolerance = 1e-12;
  Outcome o{true, ""};
  for (const WeightModel& m : {WeightModel{CuckerSmale{}}, WeightModel{LogDistance{}}}) {
    Rng rng(Rng::substream(2024, 3));
    const CheckReport r = check_quasi_nonexpansive(set, m, rng, opts);
    o.passed = o.passed && r.passed && r.violations == 0;
    o.detail += weight_model_name(m) + ": " + std::to_string(r.violations) + "/" + std::to_string(r.samples) +
                " violations, min slack " + fmt("%.3g", r.worst_margin) + "; ";
  }
  o.detail.resize(o.detail.size() - 2);
  return o;
}

Outcome doubly_stochastic() {
  const GraphSet set = single_link_graph_set(Topology::line(20));
  CheckOptions opts;
  opts.samples = 1000;
  opts.tolerance = 1e-12;
  Rng rng(Rng::substream(2024, 4));
  const CheckReport ds = check_doubly_stochastic(set, CuckerSmale{}, rng, opts);
  opts.tolerance = 1e-10;
  const CheckReport nb = check_norm_bound(set, CuckerSmale{}, rng, opts);
  Outcome o;
  o.passed = ds.passed && nb.passed;
  o.detail = "sums/entries: " + std::to_string(ds.violations) + "/" + std::to_string(ds.samples) +
             " violations (worst slack " + fmt("%.3g", ds.worst_margin) + "); |W|_2 <= 1: " +
             std::to_string(nb.violations) + "/" + std::to_string(nb.samples) + " violations (worst slack " +
             fmt("%.3g", nb.worst_margin) + ")";
  return o;
}

Outcome lemma4() {
  const GraphSet set = single_link_graph_set(Topology::line(20));
  CheckOptions opts;
  opts.samples = 10000;
  opts.tolerance = 1e-12;
  Outcome o{true, ""};
  for (double eta : {0.2, 0.5, 0.8}) {
    Rng rng(Rng::substream(2024, 5));
    const Lemma4Report r = check_lemma4(set, CuckerSmale{}, eta, rng, opts);
    o.passed = o.passed && r.passed();
    o.detail += "eta " + fmt("%.1f", eta) + ": (i) " + std::to_string(r.fixed_points.violations) + " (ii) " +
                std::to_string(r.inner_product.violations) + " (iii) " +
                std::to_string(r.quasi_nonexpansive.violations) + " violations; ";
  }
  o.detail.resize(o.detail.size() - 2);
  return o;
}

Outcome contraction() {
  const QuadraticObjective q(initial_positions_example1());
  Outcome o{true, ""};
  for (double beta : {0.25, 0.5, 1.0, 1.5}) {
    Rng rng(Rng::substream(2024, 6));
    const ContractionReport r = check_contraction(q, beta, rng, 10000);
    const double expected = std::max(std::abs(1 - beta * q.rho()), std::abs(1 - beta * q.lipschitz()));
    const bool ok = std::abs(r.max_ratio - expected) <= 1e-9;
    o.passed = o.passed && ok;
    o.detail += "beta " + fmt("%.2f", beta) + " -> " + fmt("%.12f", r.max_ratio) + "; ";
  }
  o.detail.resize(o.detail.size() - 2);
  return o;
}

Outcome connectivity() {
  const Topology l20 = Topology::line(20);
  const GraphSet full = single_link_graph_set(l20);
  std::vector<EdgeMask> cut_graphs;
  const std::size_t removed = l20.find_edge(4, 5);  // agents 5 and 6
  for (std::size_t e = 0; e < l20.edge_count(); ++e)
    if (e != removed) cut_graphs.push_back(EdgeMask::single(l20.edge_count(), e));
  const GraphSet cut = make_graph_set(l20, cut_graphs);
  Rng rng(Rng::substream(2024, 7));
  const ConnectivityReport a = check_union_connectivity(full, CuckerSmale{}, 100, rng);
  const ConnectivityReport b = check_union_connectivity(cut, CuckerSmale{}, 100, rng);
  Outcome o;
  o.passed = a.combinatorial && a.spectral.passed && !b.combinatorial && !b.spectral.passed && b.min_lambda2 < 1e-9;
  o.detail = "full line: connected=" + std::string(a.combinatorial ? "yes" : "no") + ", min lambda_2 " +
             fmt("%.3e", a.min_lambda2) + "; without (5,6): connected=" + (b.combinatorial ? "yes" : "no") +
             ", lambda_2 <= 1e-9 at " + std::to_string(b.spectral.violations) + "/" +
             std::to_string(b.spectral.samples) + " states (min " + fmt("%.1e", b.min_lambda2) + ")";
  return o;
}

Outcome residual_decay() {
  const std::size_t horizon = 500000;
  const std::size_t window = 1000;
  std::ostringstream detail;
  bool all = true;
  for (Example1Variant v : {Example1Variant::Cucker, Example1Variant::Log}) {
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      Scenario s = example1_scenario(v, seed, horizon);
      s.algo.record_every = horizon;
      const Trajectory tr = run(s);
      double head = 0.0, tail = 0.0;
      for (std::size_t k = 0; k < window; ++k) {
        head += tr.steps[k].residual;
        tail += tr.steps[tr.steps.size() - window + k].residual;
      }
      worst = std::max(worst, tail / head);
      all = all && check_residual_decay(tr, window, 0.01).passed;
    }
    detail << (v == Example1Variant::Cucker ? "cucker" : "log") << " worst tail/head ratio " << fmt("%.4f", worst)
           << "; ";
  }
  Outcome o;
  o.passed = all;
  o.detail = detail.str() + "horizon 5e5, seeds 1-3";
  return o;
}

Outcome mean_square() {
  const Scenario s = example1_scenario(Example1Variant::Cucker, 1, 10000);
  const MeanSquareCurve c = monte_carlo_mean_square(s, 50, 10000, 4);
  Outcome o;
  o.passed = c.mean[10000] < c.mean[100] && c.mean[10000] < c.mean[1000];
  o.detail = "R=50: t=100 " + fmt("%.4g", c.mean[100]) + ", t=1000 " + fmt("%.4g", c.mean[1000]) + ", t=10000 " +
             fmt("%.4g", c.mean[10000]) + " (+/- " + fmt("%.2g", c.half_width[10000]) + ")";
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const auto root = std::filesystem::temp_directory_path() / "fvpnet_acceptance_determinism";
  std::filesystem::remove_all(root);
  const std::string config = std::string(FVPNET_SOURCE_DIR) + "/configs/example1.toml";
  for (const char* name : {"a", "b"}) {
    const std::string cmd = std::string("\"") + FVPNET_CLI + "\" run --config \"" + config + "\" --seed 7 --out \"" +
                            (root / name).string() + "\" --no-plots > /dev/null";
    if (std::system(cmd.c_str()) != 0) return {false, "CLI invocation failed: " + cmd};
  }
  const std::string a = slurp(root / "a" / "trajectory.csv");
  const std::string b = slurp(root / "b" / "trajectory.csv");
  const bool metrics_same = slurp(root / "a" / "metrics.csv") == slurp(root / "b" / "metrics.csv");
  std::filesystem::remove_all(root);
  Outcome o;
  o.passed = !a.empty() && a == b && metrics_same;
  o.detail = "two CLI runs, seed 7: trajectory.csv " + std::to_string(a.size()) + " bytes, " +
             (a == b ? "identical" : "different") + "; metrics.csv " + (metrics_same ? "identical" : "different");
  return o;
}

Outcome dependency_process() {
  const Topology l20 = Topology::line(20);
  const GraphSet set = single_link_graph_set(l20);
  Outcome o{true, ""};
  double lo = 1.0, hi = 0.0;
  std::size_t min_count = SIZE_MAX;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    GraphProcess p(l20, MinOccurrenceDependency{0.5, 20}, seed);
    std::vector<GraphSample> samples;
    for (std::size_t t = 0; t < 10000; ++t) samples.push_back(p.next_sample(t));
    const OccurrenceCounts c = occurrence_counts(samples, set);
    for (std::size_t n : c.per_edge) {
      const double f = static_cast<double>(n) / 10000.0;
      lo = std::min(lo, f);
      hi = std::max(hi, f);
      o.passed = o.passed && n >= 1 && f >= 0.3 && f <= 0.7;
    }
    min_count = std::min(min_count, c.min_edge);
  }
  o.detail = "seeds 1-5, 10^4 steps: per-edge frequency in [" + fmt("%.4f", lo) + ", " + fmt("%.4f", hi) +
             "], min count " + std::to_string(min_count);
  return o;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> body;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "analytic optimum", analytic_optimum},
      {2, "example convergence", example_convergence},
      {3, "quasi-nonexpansivity", quasi_nonexpansive},
      {4, "doubly stochastic and norm bound", doubly_stochastic},
      {5, "averaged operator properties", lemma4},
      {6, "contraction ratio", contraction},
      {7, "union connectivity", connectivity},
      {8, "residual decay", residual_decay},
      {9, "mean-square convergence", mean_square},
      {10, "determinism", determinism},
      {11, "dependency process", dependency_process},
  };
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);
  int failures = 0;
  for (const Criterion& c : criteria) {
    if (only != 0 && c.id != only) continue;
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %2d %s: %s [%.2f s]\n", o.passed ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                seconds_since(start));
    std::fflush(stdout);
    if (!o.passed) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
