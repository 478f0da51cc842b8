#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fvpnet/algorithm.hpp"
#include "fvpnet/graph.hpp"
#include "fvpnet/objective.hpp"
#include "fvpnet/rng.hpp"
#include "fvpnet/state.hpp"
#include "fvpnet/weights.hpp"

namespace fvpnet {

// ---------------------------------------------------------------------------
// Consensus subspace C = {x : x_1 = ... = x_m}

/// Block mean replicated to every agent. Idempotent and 1-Lipschitz.
StackedState project_consensus(const StackedState& x);
double distance_to_consensus(const StackedState& x);
bool in_consensus(const StackedState& x, double tol = 0.0);

/// |x - s* kron 1_m|
double consensus_error(const StackedState& x, std::span<const double> reference);

/// |x - T(w*, x)|
double fixed_point_residual(const StackedState& x, const Topology& topology, const EdgeMask& active,
                            const WeightModel& model);

// ---------------------------------------------------------------------------
// Property checkers

struct CheckReport {
  std::string name;
  std::size_t samples = 0;
  std::size_t violations = 0;
  /// Smallest slack (bound minus measured value) seen; negative past the tolerance means a violation.
  double worst_margin = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

struct CheckOptions {
  std::size_t samples = 10000;
  double state_scale = 10.0;  // isotropic Gaussian std-dev for random states
  double tolerance = 1e-12;
};

/// Random states are N(0, scale^2) per coordinate; random consensus points
/// replicate one such point. Even-numbered samples use a uniformly chosen
/// member of `set`; odd-numbered samples use a uniformly random edge subset of
/// the topology (the subset-valued realizations a run produces).
CheckReport check_quasi_nonexpansive(const GraphSet& set, const WeightModel& model, Rng& rng,
                                     const CheckOptions& opts = {});

struct Lemma4Report {
  CheckReport fixed_points;  // (i) consensus points are fixed by T-hat; non-consensus points are not
  CheckReport inner_product;  // (ii) <x - T-hat x, x - z> >= eta/2 |x - T x|^2
  CheckReport quasi_nonexpansive;  // (iii) |T-hat x - z| <= |x - z|
  bool passed() const { return fixed_points.passed && inner_product.passed && quasi_nonexpansive.passed; }
};

Lemma4Report check_lemma4(const GraphSet& set, const WeightModel& model, double eta, Rng& rng,
                          const CheckOptions& opts = {});

/// Row/column sums within tolerance and entries in [0, 1] for every member
/// graph at `opts.samples` random states. A construction failure (negative
/// diagonal) is reported as a failed check, not thrown.
CheckReport check_doubly_stochastic(const GraphSet& set, const WeightModel& model, Rng& rng,
                                    const CheckOptions& opts = {});

/// |W|_2 (power iteration on W^T W) <= sqrt(|W|_1 |W|_inf) and <= 1.
CheckReport check_norm_bound(const GraphSet& set, const WeightModel& model, Rng& rng, const CheckOptions& opts = {});

/// Spectral norm: largest |eigenvalue| by Jacobi when W is symmetric, power
/// iteration on W^T W otherwise.
double spectral_norm(const MixingMatrix& w, Rng& rng, std::size_t max_iterations = 2000);

/// Every z in C is fixed by T(w*, .) for every member graph.
CheckReport check_fixed_value_points(const GraphSet& set, const WeightModel& model, Rng& rng,
                                     const CheckOptions& opts = {});

struct ConnectivityReport {
  bool combinatorial = false;
  bool spectral_applicable = false;
  double min_lambda2 = 0.0;  // over sampled states
  CheckReport spectral;
  bool passed() const { return combinatorial && (!spectral_applicable || spectral.passed); }
};

/// (a) the union graph is (strongly) connected; (b) for symmetric models, the
/// second-smallest eigenvalue of sum_w (I - W(w, x)) exceeds `lambda_tol` at
/// each sampled state. m = 1 passes trivially.
ConnectivityReport check_union_connectivity(const GraphSet& set, const WeightModel& model, std::size_t state_samples,
                                            Rng& rng, double state_scale = 10.0, double lambda_tol = 1e-9);

/// Eigenvalues of sum_w (I - W(w, x)), increasing.
std::vector<double> union_laplacian_spectrum(const GraphSet& set, const WeightModel& model, const StackedState& x);

struct ContractionReport {
  double max_ratio = 0.0;  // max |H(x) - H(y)| / |x - y|, H(x) = x - beta grad f(x)
  double gamma_hat = 0.0;  // 1 - max_ratio
  double bound = 0.0;      // max(|1 - beta rho|, |1 - beta K|)
  CheckReport report;
};

ContractionReport check_contraction(const Objective& objective, double beta, Rng& rng, std::size_t samples = 10000,
                                    double radius = 10.0, double tol = 1e-9);

/// Empirical stand-in for "occurs infinitely often": every member graph and
/// every edge occurs, and the minimum count grows from the first half of the
/// run to the end.
CheckReport check_occurrence(GraphProcess& process, std::size_t steps, const GraphSet& set);

/// |x_t - x*| <= max(|x_0 - x*|, beta |grad f(x*)| / gamma) + tol along a run,
/// with gamma = 1 - max(|1 - beta rho|, |1 - beta K|).
CheckReport check_boundedness(const Scenario& scenario, double tol = 1e-9);

/// Mean r_t over the last `window` records is below `ratio` times the mean
/// over the first `window` records.
CheckReport check_residual_decay(const Trajectory& trajectory, std::size_t window, double ratio = 0.01);

/// Every recorded e_t, r_t and state is finite and there are horizon + 1 records.
CheckReport check_trajectory_sanity(const Trajectory& trajectory, std::size_t horizon);

// ---------------------------------------------------------------------------
// Monte-Carlo mean-square convergence

struct MeanSquareCurve {
  std::size_t runs = 0;
  std::vector<double> mean;        // (1/R) sum_r |x_t^(r) - x*|^2, t = 0..T
  std::vector<double> half_width;  // 1.96 * sample std / sqrt(R)
};

/// Seed of run r: splitmix64(base + golden * (r + 1)).
std::uint64_t run_seed(std::uint64_t base, std::size_t run);

/// R >= 2 independent runs, executed on up to `threads` workers. The result
/// does not depend on the thread count.
MeanSquareCurve monte_carlo_mean_square(const Scenario& scenario, std::size_t runs, std::size_t horizon,
                                        std::size_t threads = 1);

}  // namespace fvpnet
