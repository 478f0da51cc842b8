#include "fvpnet/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fvpnet/errors.hpp"

namespace fvpnet {

Objective::Objective(std::size_t agents, std::size_t dim, double rho, double lipschitz)
    : agents_(agents), dim_(dim), rho_(rho), lipschitz_(lipschitz) {
  if (agents_ == 0 || dim_ == 0) throw InvalidInput("objective needs at least one agent and one dimension");
  if (!(rho_ > 0.0)) throw InvalidInput("objective: rho must be positive");
  if (!(lipschitz_ >= rho_) || !std::isfinite(lipschitz_)) throw InvalidInput("objective: need rho <= K < inf");
}

void Objective::require_shape(const StackedState& x) const {
  if (x.agents() != agents_ || x.dim() != dim_) throw InvalidInput("objective: state shape mismatch");
}

double Objective::value(const StackedState& x) const {
  require_shape(x);
  double s = 0.0;
  for (std::size_t i = 0; i < agents_; ++i) s += value_block(i, x.block(i));
  return s;
}

StackedState Objective::grad(const StackedState& x) const {
  require_shape(x);
  StackedState g(agents_, dim_);
  for (std::size_t i = 0; i < agents_; ++i) grad_block(i, x.block(i), g.block(i));
  if (!g.all_finite()) throw NumericError("objective: non-finite gradient");
  return g;
}

namespace {

double min_of(const std::vector<double>& v) {
  if (v.empty()) throw InvalidInput("quadratic objective: empty curvature");
  return *std::min_element(v.begin(), v.end());
}

double max_of(const std::vector<double>& v) {
  if (v.empty()) throw InvalidInput("quadratic objective: empty curvature");
  return *std::max_element(v.begin(), v.end());
}

}  // namespace

DiagonalQuadraticObjective::DiagonalQuadraticObjective(StackedState anchors, std::vector<double> curvature)
    : DiagonalQuadraticObjective(anchors, curvature, min_of(curvature), max_of(curvature)) {}

DiagonalQuadraticObjective::DiagonalQuadraticObjective(StackedState anchors, std::vector<double> curvature,
                                                       double declared_rho, double declared_lipschitz)
    : Objective(anchors.agents(), anchors.dim(), declared_rho, declared_lipschitz),
      anchors_(std::move(anchors)),
      curvature_(std::move(curvature)) {
  if (curvature_.size() != anchors_.dim()) throw InvalidInput("quadratic objective: curvature length must equal n");
  for (double a : curvature_)
    if (!(a > 0.0) || !std::isfinite(a)) throw InvalidInput("quadratic objective: curvature must be positive");
  if (!anchors_.all_finite()) throw InvalidInput("quadratic objective: non-finite anchor");
}

double DiagonalQuadraticObjective::value_block(std::size_t agent, std::span<const double> xi) const {
  const auto d = anchors_.block(agent);
  double s = 0.0;
  for (std::size_t k = 0; k < xi.size(); ++k) {
    const double r = xi[k] - d[k];
    s += curvature_[k] * r * r;
  }
  return 0.5 * s;
}

void DiagonalQuadraticObjective::grad_block(std::size_t agent, std::span<const double> xi,
                                            std::span<double> out) const {
  const auto d = anchors_.block(agent);
  for (std::size_t k = 0; k < xi.size(); ++k) out[k] = curvature_[k] * (xi[k] - d[k]);
}

std::optional<std::vector<double>> DiagonalQuadraticObjective::consensus_minimizer() const {
  return block_mean(anchors_);
}

QuadraticObjective::QuadraticObjective(StackedState anchors)
    : DiagonalQuadraticObjective(anchors, std::vector<double>(anchors.dim(), 1.0), 1.0, 1.0) {}

std::vector<double> analytic_consensus_minimizer(const QuadraticObjective& objective) {
  return block_mean(objective.anchors());
}

ConstantProbe probe_constants(const Objective& objective, std::size_t sample_count, Rng& rng, double radius,
                              double tol) {
  if (sample_count < 2) throw InvalidInput("probe_constants: need at least 2 samples");
  if (!(radius > 0.0)) throw InvalidInput("probe_constants: radius must be positive");
  ConstantProbe probe;
  probe.rho_hat = std::numeric_limits<double>::infinity();
  probe.k_hat = -std::numeric_limits<double>::infinity();
  StackedState x(objective.agents(), objective.dim());
  StackedState y(objective.agents(), objective.dim());
  for (std::size_t s = 0; s < sample_count; ++s) {
    for (std::size_t k = 0; k < x.size(); ++k) {
      x[k] = radius * (2.0 * rng.uniform01() - 1.0);
      y[k] = radius * (2.0 * rng.uniform01() - 1.0);
    }
    const StackedState dx = difference(x, y);
    const double d2 = dot(dx.values(), dx.values());
    if (d2 == 0.0) {
      ++probe.discarded;
      continue;
    }
    const StackedState dg = difference(objective.grad(x), objective.grad(y));
    const double ratio = dot(dx.values(), dg.values()) / d2;
    probe.rho_hat = std::min(probe.rho_hat, ratio);
    probe.k_hat = std::max(probe.k_hat, ratio);
    ++probe.pairs;
  }
  probe.consistent = probe.pairs > 0 && objective.rho() <= probe.rho_hat + tol && probe.k_hat <= objective.lipschitz() + tol;
  return probe;
}

}  // namespace fvpnet
