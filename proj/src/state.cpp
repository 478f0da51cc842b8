#include "fvpnet/state.hpp"

#include <cmath>

#include "fvpnet/errors.hpp"

namespace fvpnet {

StackedState::StackedState(std::size_t agents, std::size_t dim)
    : agents_(agents), dim_(dim), values_(agents * dim, 0.0) {}

StackedState::StackedState(std::size_t agents, std::size_t dim, std::vector<double> values)
    : agents_(agents), dim_(dim), values_(std::move(values)) {
  if (values_.size() != agents_ * dim_)
    throw InvalidInput("StackedState: value count does not match agents * dim");
}

StackedState StackedState::replicate(std::size_t agents, std::span<const double> point) {
  StackedState x(agents, point.size());
  for (std::size_t i = 0; i < agents; ++i)
    for (std::size_t k = 0; k < point.size(); ++k) x.block(i)[k] = point[k];
  return x;
}

bool StackedState::all_finite() const {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidInput("dot: size mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidInput("distance: size mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return std::sqrt(s);
}

StackedState difference(const StackedState& a, const StackedState& b) {
  if (!a.same_shape(b)) throw InvalidInput("difference: shape mismatch");
  StackedState out(a.agents(), a.dim());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] - b[k];
  return out;
}

std::vector<double> block_mean(const StackedState& x) {
  std::vector<double> mean(x.dim(), 0.0);
  if (x.agents() == 0) return mean;
  for (std::size_t i = 0; i < x.agents(); ++i)
    for (std::size_t k = 0; k < x.dim(); ++k) mean[k] += x.block(i)[k];
  for (double& v : mean) v /= static_cast<double>(x.agents());
  return mean;
}

}  // namespace fvpnet
