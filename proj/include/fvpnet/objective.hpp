#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fvpnet/rng.hpp"
#include "fvpnet/state.hpp"

namespace fvpnet {

/// Separable cost f(x) = sum_i f_i(x_i) with declared strong-convexity
/// modulus rho and gradient Lipschitz constant K (0 < rho <= K).
class Objective {
 public:
  Objective(std::size_t agents, std::size_t dim, double rho, double lipschitz);
  virtual ~Objective() = default;

  std::size_t agents() const { return agents_; }
  std::size_t dim() const { return dim_; }
  double rho() const { return rho_; }
  double lipschitz() const { return lipschitz_; }

  virtual double value_block(std::size_t agent, std::span<const double> xi) const = 0;
  virtual void grad_block(std::size_t agent, std::span<const double> xi, std::span<double> out) const = 0;

  /// argmin_s sum_i f_i(s) when it has a closed form.
  virtual std::optional<std::vector<double>> consensus_minimizer() const { return std::nullopt; }

  double value(const StackedState& x) const;
  /// Stacked per-agent gradients. Throws NumericError on a non-finite result.
  StackedState grad(const StackedState& x) const;

 protected:
  void require_shape(const StackedState& x) const;

 private:
  std::size_t agents_;
  std::size_t dim_;
  double rho_;
  double lipschitz_;
};

/// f_i(x_i) = 1/2 sum_k a_k (x_ik - d_ik)^2 with the same curvature vector a
/// for every agent. The declared constants default to min(a), max(a).
class DiagonalQuadraticObjective : public Objective {
 public:
  DiagonalQuadraticObjective(StackedState anchors, std::vector<double> curvature);
  DiagonalQuadraticObjective(StackedState anchors, std::vector<double> curvature, double declared_rho,
                             double declared_lipschitz);

  const StackedState& anchors() const { return anchors_; }
  const std::vector<double>& curvature() const { return curvature_; }

  double value_block(std::size_t agent, std::span<const double> xi) const override;
  void grad_block(std::size_t agent, std::span<const double> xi, std::span<double> out) const override;
  std::optional<std::vector<double>> consensus_minimizer() const override;

 private:
  StackedState anchors_;
  std::vector<double> curvature_;
};

/// f_i(x_i) = 1/2 |x_i - d_i|^2, so rho = K = 1.
class QuadraticObjective : public DiagonalQuadraticObjective {
 public:
  explicit QuadraticObjective(StackedState anchors);
};

/// (1/m) sum_i d_i, the minimizer of sum_i f_i(s).
std::vector<double> analytic_consensus_minimizer(const QuadraticObjective& objective);

struct ConstantProbe {
  double rho_hat = 0.0;  // min over pairs of <x-y, g(x)-g(y)> / |x-y|^2
  double k_hat = 0.0;    // max over pairs of the same ratio
  std::size_t pairs = 0;
  std::size_t discarded = 0;  // pairs with x == y
  bool consistent = false;    // declared rho <= rho_hat + tol and k_hat <= K + tol
};

/// Samples pairs uniformly from the box [-radius, radius]^{mn}.
ConstantProbe probe_constants(const Objective& objective, std::size_t sample_count, Rng& rng, double radius,
                              double tol = 1e-9);

}  // namespace fvpnet
