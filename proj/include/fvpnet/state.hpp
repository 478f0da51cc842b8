#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fvpnet {

/// Network state x = [x_1; ...; x_m] with x_i in R^n, stored agent-major.
class StackedState {
 public:
  StackedState() = default;
  StackedState(std::size_t agents, std::size_t dim);
  StackedState(std::size_t agents, std::size_t dim, std::vector<double> values);

  /// Every agent holds `point`.
  static StackedState replicate(std::size_t agents, std::span<const double> point);

  std::size_t agents() const { return agents_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return values_.size(); }

  std::span<double> block(std::size_t i) { return {values_.data() + i * dim_, dim_}; }
  std::span<const double> block(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }

  bool all_finite() const;
  bool same_shape(const StackedState& other) const {
    return agents_ == other.agents_ && dim_ == other.dim_;
  }

  friend bool operator==(const StackedState&, const StackedState&) = default;

 private:
  std::size_t agents_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double distance(std::span<const double> a, std::span<const double> b);

/// a - b, elementwise. Shapes must match.
StackedState difference(const StackedState& a, const StackedState& b);

/// Per-agent block mean (1/m) sum_i x_i.
std::vector<double> block_mean(const StackedState& x);

}  // namespace fvpnet
