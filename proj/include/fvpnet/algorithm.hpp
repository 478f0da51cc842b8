#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "fvpnet/graph.hpp"
#include "fvpnet/objective.hpp"
#include "fvpnet/state.hpp"
#include "fvpnet/weights.hpp"

namespace fvpnet {

struct AlgorithmConfig {
  double eta = 0.8;
  double beta = 1.0;
  /// alpha_t = 1/(1+t)^zeta. Empty means alpha_t = 0 (pure mixing, diagnostics only).
  std::optional<double> zeta = 1.0;
  std::size_t horizon = 20000;
  std::uint64_t seed = 1;
  std::size_t record_every = 10;
};

/// Throws InvalidInput unless 0 < eta < 1, 0 < beta < 2/K, 0 < zeta <= 1 and
/// record_every >= 1.
void validate_algorithm(const AlgorithmConfig& cfg, double lipschitz);

/// 1/(1+t)^zeta.
double step_size(double zeta, std::size_t t);
double step_size(const AlgorithmConfig& cfg, std::size_t t);

/// One step of
///   x_{t+1} = a_t (x_t - beta grad f(x_t)) + (1 - a_t) ((1 - eta) x_t + eta T(w*_t, x_t))
/// evaluated per agent from neighbor states only.
StackedState iterate(const StackedState& x, std::size_t t, const AlgorithmConfig& cfg, const Topology& topology,
                     const EdgeMask& active, const WeightModel& model, const Objective& objective);

/// The same update with the mixing matrix formed densely and applied as
/// W kron I_n. Reference route for equivalence checks.
StackedState iterate_dense(const StackedState& x, std::size_t t, const AlgorithmConfig& cfg,
                           const Topology& topology, const EdgeMask& active, const WeightModel& model,
                           const Objective& objective);

struct Scenario {
  Topology topology;
  GraphProcessSpec process;
  WeightModel weight;
  std::shared_ptr<const Objective> objective;
  AlgorithmConfig algo;
  StackedState x0;
  /// s*, the consensus optimum used for e_t. Filled from the objective's
  /// closed form when empty.
  std::vector<double> reference;
};

/// Cross-field validation: shapes, weight/degree bound, process, beta range.
/// Fills `reference` when the objective has a closed form. Throws InvalidInput
/// or AssumptionViolation.
void validate_scenario(Scenario& scenario);

struct StepRecord {
  std::size_t t = 0;
  double alpha = 0.0;
  double error = 0.0;     // |x_t - s* kron 1|
  double residual = 0.0;  // |x_t - T(w*_t, x_t)|
  double f_mean = 0.0;    // f at the consensus projection of x_t
  EdgeMask active;
};

struct StateSnapshot {
  std::size_t t = 0;
  StackedState x;
};

struct Trajectory {
  std::vector<StepRecord> steps;  // horizon + 1 records
  std::vector<StateSnapshot> states;  // every record_every steps plus the last
  StackedState terminal;
};

/// Called once per recorded step with x_t and the sample w*_t.
using StepObserver = std::function<void(std::size_t t, const StackedState& x, const GraphSample& sample)>;

/// Samples w*_t and applies `iterate` for t = 0..T-1. Record t = T also draws
/// w*_T so that r_T is defined; the state is not advanced with it.
/// Identical scenario and seed give bit-identical trajectories.
Trajectory run(const Scenario& scenario, const StepObserver& observer = {});

/// x_{i,0} = radius [cos((i-1) 2pi/divisions), sin((i-1) 2pi/divisions)].
StackedState circle_layout(std::size_t agents, double radius, double divisions);

/// The 20-robot warehouse layout: circle_layout(20, 10, 22).
StackedState initial_positions_example1();

enum class Example1Variant { Cucker, Log };

/// 20 agents on a line, d_i = x_{i,0}, eta = 0.8, beta = 1, zeta = 1,
/// min-occurrence Bernoulli(0.5) links with window 20.
Scenario example1_scenario(Example1Variant variant, std::uint64_t seed, std::size_t horizon,
                           std::size_t window = 20);

}  // namespace fvpnet
