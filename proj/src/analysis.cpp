#include "fvpnet/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "fvpnet/errors.hpp"
#include "fvpnet/jacobi.hpp"

namespace fvpnet {

// ---------------------------------------------------------------------------
// Consensus subspace

StackedState project_consensus(const StackedState& x) {
  const std::vector<double> mean = block_mean(x);
  return StackedState::replicate(x.agents(), mean);
}

double distance_to_consensus(const StackedState& x) {
  const StackedState p = project_consensus(x);
  return distance(x.values(), p.values());
}

bool in_consensus(const StackedState& x, double tol) {
  for (std::size_t i = 1; i < x.agents(); ++i)
    for (std::size_t k = 0; k < x.dim(); ++k)
      if (std::abs(x.block(i)[k] - x.block(0)[k]) > tol) return false;
  return true;
}

double consensus_error(const StackedState& x, std::span<const double> reference) {
  if (reference.size() != x.dim()) throw InvalidInput("consensus_error: reference dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.agents(); ++i)
    for (std::size_t k = 0; k < x.dim(); ++k) {
      const double d = x.block(i)[k] - reference[k];
      s += d * d;
    }
  return std::sqrt(s);
}

double fixed_point_residual(const StackedState& x, const Topology& topology, const EdgeMask& active,
                            const WeightModel& model) {
  const StackedState tx = apply_T(topology, active, model, x);
  return distance(x.values(), tx.values());
}

// ---------------------------------------------------------------------------
// Checkers

namespace {

StackedState random_state(std::size_t agents, std::size_t dim, double scale, Rng& rng) {
  StackedState x(agents, dim);
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = scale * rng.normal();
  return x;
}

StackedState random_consensus(std::size_t agents, std::size_t dim, double scale, Rng& rng) {
  std::vector<double> point(dim);
  for (double& v : point) v = scale * rng.normal();
  return StackedState::replicate(agents, point);
}

EdgeMask random_graph(const GraphSet& set, std::size_t sample, Rng& rng) {
  if (sample % 2 == 0) return set.graphs[rng.uniform_index(set.size())];
  EdgeMask mask(set.topology.edge_count());
  for (std::size_t e = 0; e < mask.size(); ++e)
    if (rng.uniform01() < 0.5) mask.set(e);
  return mask;
}

// state dimension used by the checkers; the weight models only see distances
constexpr std::size_t kCheckDim = 2;

class Tally {
 public:
  Tally(std::string name, double tolerance) {
    report_.name = std::move(name);
    report_.tolerance = tolerance;
    report_.worst_margin = std::numeric_limits<double>::infinity();
  }

  /// slack = bound - measured; a violation when slack < -tolerance.
  void add(double slack) {
    ++report_.samples;
    report_.worst_margin = std::min(report_.worst_margin, slack);
    if (!(slack >= -report_.tolerance)) ++report_.violations;
  }

  CheckReport finish(std::string detail = {}) {
    if (report_.samples == 0) report_.worst_margin = 0.0;
    report_.passed = report_.violations == 0;
    report_.detail = std::move(detail);
    return report_;
  }

  CheckReport fail(std::string detail) {
    report_.passed = false;
    report_.worst_margin = report_.samples == 0 ? 0.0 : report_.worst_margin;
    report_.detail = std::move(detail);
    return report_;
  }

 private:
  CheckReport report_;
};

}  // namespace

CheckReport check_quasi_nonexpansive(const GraphSet& set, const WeightModel& model, Rng& rng,
                                     const CheckOptions& opts) {
  Tally tally("quasi_nonexpansive", opts.tolerance);
  const std::size_t m = set.topology.agents();
  try {
    for (std::size_t s = 0; s < opts.samples; ++s) {
      const StackedState x = random_state(m, kCheckDim, opts.state_scale, rng);
      const StackedState z = random_consensus(m, kCheckDim, opts.state_scale, rng);
      const EdgeMask g = random_graph(set, s, rng);
      const StackedState tx = apply_T(set.topology, g, model, x);
      tally.add(distance(x.values(), z.values()) - distance(tx.values(), z.values()));
    }
  } catch (const Error& e) {
    return tally.fail(std::string("construction error: ") + e.what());
  }
  return tally.finish("|T(w,x) - z| <= |x - z| for z in C");
}

Lemma4Report check_lemma4(const GraphSet& set, const WeightModel& model, double eta, Rng& rng,
                          const CheckOptions& opts) {
  if (!(eta > 0.0 && eta < 1.0)) throw InvalidInput("check_lemma4: eta must lie in (0, 1)");
  Tally fixed("lemma4_fixed_points", opts.tolerance);
  Tally inner("lemma4_inner_product", opts.tolerance);
  Tally quasi("lemma4_quasi_nonexpansive", opts.tolerance);
  const std::size_t m = set.topology.agents();
  const Topology& topo = set.topology;
  try {
    for (std::size_t s = 0; s < opts.samples; ++s) {
      const StackedState x = random_state(m, kCheckDim, opts.state_scale, rng);
      const StackedState z = random_consensus(m, kCheckDim, opts.state_scale, rng);
      const EdgeMask g = random_graph(set, s, rng);

      // (i) z in C is fixed by T-hat, and |x - T-hat x| = eta |x - T x| so the fixed sets coincide
      const StackedState that_z = apply_T_hat(eta, topo, g, model, z);
      fixed.add(-distance(z.values(), that_z.values()));
      const StackedState tx = apply_T(topo, g, model, x);
      const StackedState that_x = apply_T_hat(eta, topo, g, model, x);
      const double res_t = distance(x.values(), tx.values());
      const double res_that = distance(x.values(), that_x.values());
      fixed.add(-std::abs(res_that - eta * res_t));

      // (ii)
      const StackedState step = difference(x, that_x);
      const StackedState offset = difference(x, z);
      inner.add(dot(step.values(), offset.values()) - 0.5 * eta * res_t * res_t);

      // (iii)
      quasi.add(distance(x.values(), z.values()) - distance(that_x.values(), z.values()));
    }
  } catch (const Error& e) {
    const std::string why = std::string("construction error: ") + e.what();
    return {fixed.fail(why), inner.fail(why), quasi.fail(why)};
  }
  std::ostringstream tag;
  tag << "eta=" << eta;
  return {fixed.finish(tag.str() + "; |z - T-hat z| = 0 on C and |x - T-hat x| = eta |x - T x|"),
          inner.finish(tag.str() + "; <x - T-hat x, x - z> >= eta/2 |x - T x|^2"),
          quasi.finish(tag.str() + "; |T-hat x - z| <= |x - z|")};
}

CheckReport check_doubly_stochastic(const GraphSet& set, const WeightModel& model, Rng& rng,
                                    const CheckOptions& opts) {
  Tally tally("doubly_stochastic", opts.tolerance);
  const std::size_t m = set.topology.agents();
  try {
    for (std::size_t s = 0; s < opts.samples; ++s) {
      const StackedState x = random_state(m, kCheckDim, opts.state_scale, rng);
      for (const EdgeMask& g : set.graphs) {
        const MixingMatrix w = build_mixing_matrix(set.topology, g, model, x);
        double slack = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i) {
          slack = std::min(slack, -std::abs(w.row_sum(i) - 1.0));
          slack = std::min(slack, -std::abs(w.col_sum(i) - 1.0));
          for (std::size_t j = 0; j < m; ++j) {
            // entries outside [0, 1] are hard violations regardless of tolerance
            if (w(i, j) < 0.0) slack = std::min(slack, w(i, j) - 1.0);
            if (w(i, j) > 1.0) slack = std::min(slack, -w(i, j));
          }
        }
        tally.add(slack);
      }
    }
  } catch (const Error& e) {
    return tally.fail(std::string("construction error: ") + e.what());
  }
  return tally.finish("row and column sums equal 1, entries in [0, 1]");
}

double spectral_norm(const MixingMatrix& w, Rng& rng, std::size_t max_iterations) {
  const std::size_t m = w.size();
  if (m == 0) return 0.0;
  if (w.symmetric()) {
    std::vector<double> a(m * m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) a[i * m + j] = w(i, j);
    const std::vector<double> eig = jacobi_eigenvalues(std::move(a), m);
    return std::max(std::abs(eig.front()), std::abs(eig.back()));
  }
  std::vector<double> v(m), wv(m), next(m);
  for (double& e : v) e = 1.0 + 0.1 * rng.normal();
  double estimate = 0.0;
  for (std::size_t it = 0; it < max_iterations; ++it) {
    const double nv = norm2(v);
    if (nv == 0.0) return 0.0;
    for (double& e : v) e /= nv;
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < m; ++j) s += w(i, j) * v[j];
      wv[i] = s;
    }
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) s += w(i, j) * wv[i];
      next[j] = s;
    }
    const double rayleigh = dot(v, next);  // v^T W^T W v with |v| = 1
    v.swap(next);
    if (std::abs(rayleigh - estimate) <= 1e-15 * std::max(1.0, rayleigh)) {
      estimate = rayleigh;
      break;
    }
    estimate = rayleigh;
  }
  return std::sqrt(std::max(estimate, 0.0));
}

CheckReport check_norm_bound(const GraphSet& set, const WeightModel& model, Rng& rng, const CheckOptions& opts) {
  Tally tally("norm_bound", opts.tolerance);
  const std::size_t m = set.topology.agents();
  try {
    for (std::size_t s = 0; s < opts.samples; ++s) {
      const StackedState x = random_state(m, kCheckDim, opts.state_scale, rng);
      for (const EdgeMask& g : set.graphs) {
        const MixingMatrix w = build_mixing_matrix(set.topology, g, model, x);
        const double two = spectral_norm(w, rng);
        const double bound = std::sqrt(w.norm1() * w.norm_inf());
        tally.add(std::min(bound - two, 1.0 - two));
      }
    }
  } catch (const Error& e) {
    return tally.fail(std::string("construction error: ") + e.what());
  }
  return tally.finish("|W|_2 <= sqrt(|W|_1 |W|_inf) = 1");
}

CheckReport check_fixed_value_points(const GraphSet& set, const WeightModel& model, Rng& rng,
                                     const CheckOptions& opts) {
  Tally tally("fixed_value_points", opts.tolerance);
  const std::size_t m = set.topology.agents();
  try {
    for (std::size_t s = 0; s < opts.samples; ++s) {
      const StackedState z = random_consensus(m, kCheckDim, opts.state_scale, rng);
      for (const EdgeMask& g : set.graphs) tally.add(-fixed_point_residual(z, set.topology, g, model));
    }
  } catch (const Error& e) {
    return tally.fail(std::string("construction error: ") + e.what());
  }
  return tally.finish("|z - T(w, z)| = 0 for every z in C and every member graph");
}

std::vector<double> union_laplacian_spectrum(const GraphSet& set, const WeightModel& model, const StackedState& x) {
  const std::size_t m = set.topology.agents();
  std::vector<double> sum(m * m, 0.0);
  for (const EdgeMask& g : set.graphs) {
    const MixingMatrix w = build_mixing_matrix(set.topology, g, model, x);
    if (!w.symmetric()) throw InvalidInput("union_laplacian_spectrum: spectral check needs symmetric weights");
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) sum[i * m + j] += (i == j ? 1.0 : 0.0) - w(i, j);
  }
  return jacobi_eigenvalues(std::move(sum), m);
}

ConnectivityReport check_union_connectivity(const GraphSet& set, const WeightModel& model, std::size_t state_samples,
                                            Rng& rng, double state_scale, double lambda_tol) {
  ConnectivityReport out;
  const Topology u = union_graph(set);
  out.combinatorial = u.connected();
  const std::size_t m = set.topology.agents();
  Tally tally("union_connectivity_spectral", 0.0);
  if (m <= 1) {
    out.spectral = tally.finish("single agent: connected, lambda_2 undefined");
    out.spectral.passed = true;
    return out;
  }
  out.spectral_applicable = !set.topology.directed();
  if (!out.spectral_applicable) {
    out.spectral = tally.finish("directed graph set: spectral check not applicable");
    out.spectral.passed = true;
    return out;
  }
  out.min_lambda2 = std::numeric_limits<double>::infinity();
  try {
    for (std::size_t s = 0; s < state_samples; ++s) {
      const StackedState x = random_state(m, kCheckDim, state_scale, rng);
      const std::vector<double> eig = union_laplacian_spectrum(set, model, x);
      out.min_lambda2 = std::min(out.min_lambda2, eig[1]);
      tally.add(eig[1] - lambda_tol);
    }
  } catch (const Error& e) {
    out.spectral = tally.fail(std::string("construction error: ") + e.what());
    return out;
  }
  std::ostringstream detail;
  detail << "union " << (out.combinatorial ? "connected" : "disconnected") << "; min lambda_2 = " << out.min_lambda2
         << " (threshold " << lambda_tol << ")";
  out.spectral = tally.finish(detail.str());
  return out;
}

ContractionReport check_contraction(const Objective& objective, double beta, Rng& rng, std::size_t samples,
                                    double radius, double tol) {
  const double rho = objective.rho();
  const double k = objective.lipschitz();
  if (!(beta > 0.0 && beta * k < 2.0)) throw InvalidInput("check_contraction: beta must lie in (0, 2/K)");
  ContractionReport out;
  out.bound = std::max(std::abs(1.0 - beta * rho), std::abs(1.0 - beta * k));
  Tally tally("contraction", tol);
  StackedState x(objective.agents(), objective.dim());
  StackedState y(objective.agents(), objective.dim());
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t c = 0; c < x.size(); ++c) {
      x[c] = radius * (2.0 * rng.uniform01() - 1.0);
      y[c] = radius * (2.0 * rng.uniform01() - 1.0);
    }
    const double dxy = distance(x.values(), y.values());
    if (dxy == 0.0) continue;
    const StackedState gx = objective.grad(x);
    const StackedState gy = objective.grad(y);
    double h2 = 0.0;
    for (std::size_t c = 0; c < x.size(); ++c) {
      const double d = (x[c] - beta * gx[c]) - (y[c] - beta * gy[c]);
      h2 += d * d;
    }
    const double ratio = std::sqrt(h2) / dxy;
    out.max_ratio = std::max(out.max_ratio, ratio);
    tally.add(out.bound - ratio);
  }
  out.gamma_hat = 1.0 - out.max_ratio;
  std::ostringstream detail;
  detail << "beta=" << beta << "; max ratio " << out.max_ratio << ", bound " << out.bound << ", gamma_hat "
         << out.gamma_hat;
  out.report = tally.finish(detail.str());
  return out;
}

CheckReport check_occurrence(GraphProcess& process, std::size_t steps, const GraphSet& set) {
  if (steps < 1) throw InvalidInput("check_occurrence: need at least one step");
  std::vector<GraphSample> samples;
  samples.reserve(steps);
  for (std::size_t t = 0; t < steps; ++t) samples.push_back(process.next_sample(t));
  const std::vector<GraphSample> first_half(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(steps / 2));
  const OccurrenceCounts all = occurrence_counts(samples, set);
  CheckReport r;
  r.name = "occurrence";
  r.samples = steps;
  const std::size_t half_min = first_half.empty() ? 0 : occurrence_counts(first_half, set).min_graph;
  for (std::size_t c : all.per_graph)
    if (c == 0) ++r.violations;
  for (std::size_t c : all.per_edge)
    if (c == 0) ++r.violations;
  const bool growing = all.min_graph > half_min;
  r.worst_margin = static_cast<double>(std::min(all.min_graph, all.min_edge));
  r.passed = r.violations == 0 && growing;
  std::ostringstream detail;
  detail << "min graph count " << all.min_graph << " (first half " << half_min << "), min edge count " << all.min_edge;
  r.detail = detail.str();
  return r;
}

CheckReport check_boundedness(const Scenario& scenario, double tol) {
  const Objective& obj = *scenario.objective;
  const double beta = scenario.algo.beta;
  const double gamma = 1.0 - std::max(std::abs(1.0 - beta * obj.rho()), std::abs(1.0 - beta * obj.lipschitz()));
  const StackedState star = StackedState::replicate(scenario.x0.agents(), scenario.reference);
  const double grad_star = norm2(obj.grad(star).values());
  const double radius = std::max(distance(scenario.x0.values(), star.values()), beta * grad_star / gamma);
  Tally tally("boundedness", tol);
  Scenario quiet = scenario;
  quiet.algo.record_every = std::max<std::size_t>(1, scenario.algo.horizon);
  run(quiet, [&](std::size_t, const StackedState& x, const GraphSample&) {
    tally.add(radius - distance(x.values(), star.values()));
  });
  std::ostringstream detail;
  detail << "|x_t - x*| <= " << radius << " (gamma " << gamma << ")";
  return tally.finish(detail.str());
}

CheckReport check_residual_decay(const Trajectory& trajectory, std::size_t window, double ratio) {
  CheckReport r;
  r.name = "residual_decay";
  r.tolerance = ratio;
  const std::size_t n = trajectory.steps.size();
  if (window == 0 || 2 * window > n) {
    r.detail = "trajectory shorter than two windows";
    return r;
  }
  double head = 0.0, tail = 0.0;
  for (std::size_t k = 0; k < window; ++k) {
    head += trajectory.steps[k].residual;
    tail += trajectory.steps[n - window + k].residual;
  }
  head /= static_cast<double>(window);
  tail /= static_cast<double>(window);
  r.samples = 2 * window;
  r.worst_margin = ratio * head - tail;
  r.passed = tail < ratio * head;
  r.violations = r.passed ? 0 : 1;
  std::ostringstream detail;
  detail << "mean r_t first " << window << ": " << head << ", last " << window << ": " << tail << " (ratio "
         << (head > 0.0 ? tail / head : 0.0) << ")";
  r.detail = detail.str();
  return r;
}

CheckReport check_trajectory_sanity(const Trajectory& trajectory, std::size_t horizon) {
  Tally tally("trajectory_sanity", 0.0);
  for (const StepRecord& s : trajectory.steps)
    tally.add(std::isfinite(s.error) && std::isfinite(s.residual) && std::isfinite(s.f_mean) ? 0.0 : -1.0);
  for (const StateSnapshot& s : trajectory.states) tally.add(s.x.all_finite() ? 0.0 : -1.0);
  if (trajectory.steps.size() != horizon + 1)
    return tally.fail("expected " + std::to_string(horizon + 1) + " records, got " +
                      std::to_string(trajectory.steps.size()));
  return tally.finish("records finite, count = horizon + 1");
}

// ---------------------------------------------------------------------------
// Monte Carlo

std::uint64_t run_seed(std::uint64_t base, std::size_t run) {
  return splitmix64(base + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(run) + 1));
}

namespace {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      carry_ += (sum_ - t) + v;
    else
      carry_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace

MeanSquareCurve monte_carlo_mean_square(const Scenario& scenario, std::size_t runs, std::size_t horizon,
                                        std::size_t threads) {
  if (runs < 2) throw InvalidInput("monte_carlo_mean_square: need at least 2 runs");
  std::vector<std::vector<double>> squared(runs);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= runs || failed.load()) return;
      try {
        Scenario s = scenario;
        s.algo.seed = run_seed(scenario.algo.seed, r);
        s.algo.horizon = horizon;
        s.algo.record_every = std::max<std::size_t>(1, horizon);
        const Trajectory traj = run(s);
        std::vector<double>& out = squared[r];
        out.reserve(traj.steps.size());
        for (const StepRecord& rec : traj.steps) out.push_back(rec.error * rec.error);
      } catch (const std::exception& e) {
        std::lock_guard lock(failure_mutex);
        failure = e.what();
        failed = true;
        return;
      }
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(threads, 1, runs);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failed) throw Error("monte_carlo_mean_square: " + failure);

  MeanSquareCurve curve;
  curve.runs = runs;
  curve.mean.resize(horizon + 1);
  curve.half_width.resize(horizon + 1);
  const double r_count = static_cast<double>(runs);
  for (std::size_t t = 0; t <= horizon; ++t) {
    // fixed run order keeps the sums independent of scheduling
    CompensatedSum sum;
    for (std::size_t r = 0; r < runs; ++r) sum.add(squared[r][t]);
    const double mean = sum.value() / r_count;
    CompensatedSum dev;
    for (std::size_t r = 0; r < runs; ++r) {
      const double d = squared[r][t] - mean;
      dev.add(d * d);
    }
    const double sample_std = std::sqrt(dev.value() / (r_count - 1.0));
    curve.mean[t] = mean;
    curve.half_width[t] = 1.96 * sample_std / std::sqrt(r_count);
  }
  return curve;
}

}  // namespace fvpnet
