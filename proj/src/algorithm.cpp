#include "fvpnet/algorithm.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "fvpnet/analysis.hpp"
#include "fvpnet/errors.hpp"

namespace fvpnet {

void validate_algorithm(const AlgorithmConfig& cfg, double lipschitz) {
  if (!(cfg.eta > 0.0 && cfg.eta < 1.0)) throw InvalidInput("algo.eta must lie in (0, 1)");
  if (!(lipschitz > 0.0)) throw InvalidInput("beta can only be validated against a positive declared K");
  if (!(cfg.beta > 0.0 && cfg.beta * lipschitz < 2.0)) {
    std::ostringstream msg;
    msg << "algo.beta = " << cfg.beta << " is outside (0, 2/K) = (0, " << 2.0 / lipschitz << ") for K = " << lipschitz;
    throw InvalidInput(msg.str());
  }
  if (cfg.zeta && !(*cfg.zeta > 0.0 && *cfg.zeta <= 1.0)) throw InvalidInput("algo.zeta must lie in (0, 1]");
  if (cfg.record_every < 1) throw InvalidInput("algo.record_every must be at least 1");
}

double step_size(double zeta, std::size_t t) {
  if (!(zeta > 0.0 && zeta <= 1.0)) throw InvalidInput("step_size: zeta must lie in (0, 1]");
  const double base = 1.0 + static_cast<double>(t);
  return zeta == 1.0 ? 1.0 / base : std::pow(base, -zeta);
}

double step_size(const AlgorithmConfig& cfg, std::size_t t) { return cfg.zeta ? step_size(*cfg.zeta, t) : 0.0; }

namespace {

StackedState combine(const StackedState& x, const StackedState& mixed, const StackedState& gradient, double alpha,
                     const AlgorithmConfig& cfg) {
  StackedState next(x.agents(), x.dim());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double descent = x[k] - cfg.beta * gradient[k];
    const double averaged = (1.0 - cfg.eta) * x[k] + cfg.eta * mixed[k];
    next[k] = alpha * descent + (1.0 - alpha) * averaged;
  }
  if (!next.all_finite()) throw NumericError("iterate: non-finite update");
  return next;
}

}  // namespace

StackedState iterate(const StackedState& x, std::size_t t, const AlgorithmConfig& cfg, const Topology& topology,
                     const EdgeMask& active, const WeightModel& model, const Objective& objective) {
  const double alpha = step_size(cfg, t);
  const StackedState mixed = apply_T(topology, active, model, x);
  // each agent reads only its own gradient
  StackedState gradient(x.agents(), x.dim());
  for (std::size_t i = 0; i < x.agents(); ++i) objective.grad_block(i, x.block(i), gradient.block(i));
  return combine(x, mixed, gradient, alpha, cfg);
}

StackedState iterate_dense(const StackedState& x, std::size_t t, const AlgorithmConfig& cfg,
                           const Topology& topology, const EdgeMask& active, const WeightModel& model,
                           const Objective& objective) {
  const double alpha = step_size(cfg, t);
  const MixingMatrix w = build_mixing_matrix(topology, active, model, x);
  return combine(x, w.apply(x), objective.grad(x), alpha, cfg);
}

void validate_scenario(Scenario& scenario) {
  if (!scenario.objective) throw InvalidInput("scenario has no objective");
  const Objective& obj = *scenario.objective;
  if (scenario.x0.agents() != scenario.topology.agents())
    throw InvalidInput("initial state has " + std::to_string(scenario.x0.agents()) + " agents, topology has " +
                       std::to_string(scenario.topology.agents()));
  if (obj.agents() != scenario.x0.agents() || obj.dim() != scenario.x0.dim())
    throw InvalidInput("objective shape does not match the initial state");
  if (!scenario.x0.all_finite()) throw InvalidInput("initial state has non-finite entries");
  validate_weight_model(scenario.weight, scenario.topology);
  validate_process(scenario.process, scenario.topology);
  validate_algorithm(scenario.algo, obj.lipschitz());
  if (scenario.reference.empty()) {
    if (auto s = obj.consensus_minimizer()) scenario.reference = std::move(*s);
    else throw InvalidInput("objective has no closed-form optimum; supply the reference point explicitly");
  }
  if (scenario.reference.size() != scenario.x0.dim()) throw InvalidInput("reference point has the wrong dimension");
}

Trajectory run(const Scenario& scenario, const StepObserver& observer) {
  if (!scenario.objective) throw InvalidInput("scenario has no objective");
  if (scenario.reference.size() != scenario.x0.dim()) throw InvalidInput("scenario reference point is not set");
  const AlgorithmConfig& cfg = scenario.algo;
  const Objective& obj = *scenario.objective;
  GraphProcess process(scenario.topology, scenario.process, cfg.seed);

  Trajectory traj;
  traj.steps.reserve(cfg.horizon + 1);
  StackedState x = scenario.x0;
  for (std::size_t t = 0;; ++t) {
    const GraphSample sample = process.next_sample(t);
    const std::vector<double> mean = block_mean(x);
    StepRecord rec;
    rec.t = t;
    rec.alpha = step_size(cfg, t);
    rec.error = consensus_error(x, scenario.reference);
    rec.residual = fixed_point_residual(x, scenario.topology, sample.active, scenario.weight);
    rec.f_mean = obj.value(StackedState::replicate(x.agents(), mean));
    rec.active = sample.active;
    traj.steps.push_back(std::move(rec));
    if (observer) observer(t, x, sample);
    if (t % cfg.record_every == 0 || t == cfg.horizon) traj.states.push_back({t, x});
    if (t == cfg.horizon) break;
    x = iterate(x, t, cfg, scenario.topology, sample.active, scenario.weight, obj);
  }
  traj.terminal = std::move(x);
  return traj;
}

StackedState circle_layout(std::size_t agents, double radius, double divisions) {
  StackedState x(agents, 2);
  for (std::size_t i = 0; i < agents; ++i) {
    const double angle = static_cast<double>(i) * 2.0 * std::numbers::pi / divisions;
    x.block(i)[0] = radius * std::cos(angle);
    x.block(i)[1] = radius * std::sin(angle);
  }
  return x;
}

StackedState initial_positions_example1() { return circle_layout(20, 10.0, 22.0); }

Scenario example1_scenario(Example1Variant variant, std::uint64_t seed, std::size_t horizon, std::size_t window) {
  Scenario s;
  s.topology = Topology::line(20);
  s.process = MinOccurrenceDependency{0.5, window};
  if (variant == Example1Variant::Cucker)
    s.weight = CuckerSmale{0.25, 1.0, 1.0};
  else
    s.weight = LogDistance{0.25};
  s.x0 = initial_positions_example1();
  s.objective = std::make_shared<QuadraticObjective>(s.x0);
  s.algo.eta = 0.8;
  s.algo.beta = 1.0;
  s.algo.zeta = 1.0;
  s.algo.horizon = horizon;
  s.algo.seed = seed;
  validate_scenario(s);
  return s;
}

}  // namespace fvpnet
