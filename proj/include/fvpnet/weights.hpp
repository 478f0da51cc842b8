#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fvpnet/graph.hpp"
#include "fvpnet/state.hpp"

namespace fvpnet {

/// Q / (sigma^2 + |x_i - x_j|^2)^beta_w
struct CuckerSmale {
  double q = 0.25;
  double sigma = 1.0;
  double beta_w = 1.0;
};

/// Q / (1 + log^2(1 + |x_i - x_j|))
struct LogDistance {
  double q = 0.25;
};

struct ConstantWeight {
  double c = 0.25;
};

using WeightModel = std::variant<CuckerSmale, LogDistance, ConstantWeight>;

std::string weight_model_name(const WeightModel& model);

/// Link weight between two agent states. Throws NumericError on non-finite
/// input and InvalidInput on a dimension mismatch.
double eval_weight(const WeightModel& model, std::span<const double> xi, std::span<const double> xj);

/// Supremum of the weight over all states (attained at zero distance).
double sup_weight(const WeightModel& model);

/// Rejects bad parameters and models whose weights could push a diagonal
/// entry below zero on this topology (max_degree * sup_weight > 1).
/// Throws InvalidInput or AssumptionViolation.
void validate_weight_model(const WeightModel& model, const Topology& topology);

/// Dense m x m matrix, row-major.
class MixingMatrix {
 public:
  MixingMatrix() = default;
  explicit MixingMatrix(std::size_t m) : m_(m), data_(m * m, 0.0) {}
  static MixingMatrix identity(std::size_t m);

  std::size_t size() const { return m_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * m_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * m_ + j]; }

  double row_sum(std::size_t i) const;
  double col_sum(std::size_t j) const;
  bool symmetric() const;

  /// (W kron I_n) x, formed densely. Used as the reference route in checks.
  StackedState apply(const StackedState& x) const;

  double norm1() const;     // max column abs-sum
  double norm_inf() const;  // max row abs-sum

 private:
  std::size_t m_ = 0;
  std::vector<double> data_;
};

/// Row/column sums within tol of 1 and entries in [0, 1]. Used to accept
/// user-supplied (possibly directed) matrices.
bool is_doubly_stochastic(const MixingMatrix& w, double tol = 1e-12);

/// W(w*, x): model weight on each active undirected edge (both orientations),
/// diagonal = 1 - off-diagonal row sum. Empty sample gives the identity.
/// Throws AssumptionViolation when a diagonal entry would be negative.
MixingMatrix build_mixing_matrix(const Topology& topology, const EdgeMask& active, const WeightModel& model,
                                 const StackedState& x);

/// T(w*, x) = (W kron I_n) x, computed from neighbor sums without forming W.
StackedState apply_T(const Topology& topology, const EdgeMask& active, const WeightModel& model,
                     const StackedState& x);

/// (1 - eta) x + eta T(w*, x), eta in (0, 1).
StackedState apply_T_hat(double eta, const Topology& topology, const EdgeMask& active, const WeightModel& model,
                         const StackedState& x);

}  // namespace fvpnet
