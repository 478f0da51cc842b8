#include "fvpnet/weights.hpp"

#include <cmath>
#include <string>

#include "fvpnet/errors.hpp"

namespace fvpnet {

namespace {

// headroom for rounding in the weight row sum
constexpr double kDiagonalSlack = 1e-15;

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidInput("eval_weight: state dimensions differ");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!std::isfinite(a[k]) || !std::isfinite(b[k])) throw NumericError("eval_weight: non-finite state");
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

void require_undirected(const Topology& topology) {
  if (topology.directed())
    throw InvalidInput("built-in weight models need undirected edges; supply a validated matrix for directed graphs");
}

void require_shape(const Topology& topology, const EdgeMask& active, const StackedState& x) {
  if (active.size() != topology.edge_count()) throw InvalidInput("sample does not match the topology");
  if (x.agents() != topology.agents()) throw InvalidInput("state agent count does not match the topology");
}

}  // namespace

std::string weight_model_name(const WeightModel& model) {
  return std::visit(
      [](const auto& w) -> std::string {
        using W = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<W, CuckerSmale>) return "cucker_smale";
        else if constexpr (std::is_same_v<W, LogDistance>) return "log_distance";
        else return "constant";
      },
      model);
}

double eval_weight(const WeightModel& model, std::span<const double> xi, std::span<const double> xj) {
  const double d2 = squared_distance(xi, xj);
  return std::visit(
      [d2](const auto& w) -> double {
        using W = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<W, CuckerSmale>) {
          return w.q / std::pow(w.sigma * w.sigma + d2, w.beta_w);
        } else if constexpr (std::is_same_v<W, LogDistance>) {
          const double l = std::log1p(std::sqrt(d2));
          return w.q / (1.0 + l * l);
        } else {
          return w.c;
        }
      },
      model);
}

double sup_weight(const WeightModel& model) {
  return std::visit(
      [](const auto& w) -> double {
        using W = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<W, CuckerSmale>) return w.q / std::pow(w.sigma, 2.0 * w.beta_w);
        else if constexpr (std::is_same_v<W, LogDistance>) return w.q;
        else return w.c;
      },
      model);
}

void validate_weight_model(const WeightModel& model, const Topology& topology) {
  std::visit(
      [](const auto& w) {
        using W = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<W, CuckerSmale>) {
          if (!(w.q > 0.0)) throw InvalidInput("cucker_smale: Q must be positive");
          if (!(w.sigma > 0.0)) throw InvalidInput("cucker_smale: sigma must be positive");
          if (!(w.beta_w >= 0.0) || !std::isfinite(w.beta_w)) throw InvalidInput("cucker_smale: beta_w must be >= 0");
        } else if constexpr (std::is_same_v<W, LogDistance>) {
          if (!(w.q > 0.0)) throw InvalidInput("log_distance: Q must be positive");
        } else {
          if (!(w.c > 0.0 && w.c <= 1.0)) throw InvalidInput("constant: c must lie in (0, 1]");
        }
      },
      model);
  const double sup = sup_weight(model);
  if (!(sup <= 1.0)) throw AssumptionViolation(weight_model_name(model) + ": supremum weight " + std::to_string(sup) + " exceeds 1");
  const double worst_row = static_cast<double>(topology.max_degree()) * sup;
  if (worst_row > 1.0)
    throw AssumptionViolation(weight_model_name(model) + ": max degree " + std::to_string(topology.max_degree()) +
                              " times supremum weight " + std::to_string(sup) + " exceeds 1");
}

MixingMatrix MixingMatrix::identity(std::size_t m) {
  MixingMatrix w(m);
  for (std::size_t i = 0; i < m; ++i) w(i, i) = 1.0;
  return w;
}

double MixingMatrix::row_sum(std::size_t i) const {
  double s = 0.0;
  for (std::size_t j = 0; j < m_; ++j) s += (*this)(i, j);
  return s;
}

double MixingMatrix::col_sum(std::size_t j) const {
  double s = 0.0;
  for (std::size_t i = 0; i < m_; ++i) s += (*this)(i, j);
  return s;
}

bool MixingMatrix::symmetric() const {
  for (std::size_t i = 0; i < m_; ++i)
    for (std::size_t j = i + 1; j < m_; ++j)
      if ((*this)(i, j) != (*this)(j, i)) return false;
  return true;
}

StackedState MixingMatrix::apply(const StackedState& x) const {
  if (x.agents() != m_) throw InvalidInput("MixingMatrix::apply: agent count mismatch");
  StackedState out(x.agents(), x.dim());
  for (std::size_t i = 0; i < m_; ++i)
    for (std::size_t j = 0; j < m_; ++j) {
      const double w = (*this)(i, j);
      if (w == 0.0) continue;
      for (std::size_t k = 0; k < x.dim(); ++k) out.block(i)[k] += w * x.block(j)[k];
    }
  return out;
}

double MixingMatrix::norm1() const {
  double best = 0.0;
  for (std::size_t j = 0; j < m_; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m_; ++i) s += std::abs((*this)(i, j));
    best = std::max(best, s);
  }
  return best;
}

double MixingMatrix::norm_inf() const {
  double best = 0.0;
  for (std::size_t i = 0; i < m_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m_; ++j) s += std::abs((*this)(i, j));
    best = std::max(best, s);
  }
  return best;
}

bool is_doubly_stochastic(const MixingMatrix& w, double tol) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t j = 0; j < w.size(); ++j)
      if (!(w(i, j) >= 0.0 && w(i, j) <= 1.0)) return false;
    if (std::abs(w.row_sum(i) - 1.0) > tol || std::abs(w.col_sum(i) - 1.0) > tol) return false;
  }
  return true;
}

MixingMatrix build_mixing_matrix(const Topology& topology, const EdgeMask& active, const WeightModel& model,
                                 const StackedState& x) {
  require_undirected(topology);
  require_shape(topology, active, x);
  MixingMatrix w(topology.agents());
  for (std::size_t e = 0; e < topology.edge_count(); ++e) {
    if (!active.test(e)) continue;
    const Edge& edge = topology.edge(e);
    const double v = eval_weight(model, x.block(edge.from), x.block(edge.to));
    w(edge.from, edge.to) = v;
    w(edge.to, edge.from) = v;
  }
  for (std::size_t i = 0; i < topology.agents(); ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < topology.agents(); ++j)
      if (j != i) off += w(i, j);
    const double diag = 1.0 - off;
    if (diag < 0.0)
      throw AssumptionViolation("mixing matrix: diagonal entry " + std::to_string(i + 1) + " is " + std::to_string(diag) +
                                " (weights too large for the vertex degree)");
    w(i, i) = diag;
  }
  return w;
}

StackedState apply_T(const Topology& topology, const EdgeMask& active, const WeightModel& model,
                     const StackedState& x) {
  require_undirected(topology);
  require_shape(topology, active, x);
  StackedState out = x;
  std::vector<double> weight_sum(topology.agents(), 0.0);
  const std::size_t n = x.dim();
  for (std::size_t e = 0; e < topology.edge_count(); ++e) {
    if (!active.test(e)) continue;
    const Edge& edge = topology.edge(e);
    const auto xi = x.block(edge.from);
    const auto xj = x.block(edge.to);
    const double v = eval_weight(model, xi, xj);
    weight_sum[edge.from] += v;
    weight_sum[edge.to] += v;
    auto oi = out.block(edge.from);
    auto oj = out.block(edge.to);
    // x_i' = x_i + sum_j w_ij (x_j - x_i): consensus states are reproduced exactly
    for (std::size_t k = 0; k < n; ++k) {
      const double d = xj[k] - xi[k];
      oi[k] += v * d;
      oj[k] -= v * d;
    }
  }
  for (std::size_t i = 0; i < weight_sum.size(); ++i)
    if (weight_sum[i] > 1.0 + kDiagonalSlack)
      throw AssumptionViolation("apply_T: weights at agent " + std::to_string(i + 1) + " sum to " +
                                std::to_string(weight_sum[i]) + " > 1");
  if (!out.all_finite()) throw NumericError("apply_T: non-finite result");
  return out;
}

StackedState apply_T_hat(double eta, const Topology& topology, const EdgeMask& active, const WeightModel& model,
                         const StackedState& x) {
  if (!(eta > 0.0 && eta < 1.0)) throw InvalidInput("apply_T_hat: eta must lie in (0, 1)");
  StackedState out = apply_T(topology, active, model, x);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = (1.0 - eta) * x[k] + eta * out[k];
  return out;
}

}  // namespace fvpnet
