#include "fvpnet/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>

#include "fvpnet/errors.hpp"

namespace fvpnet {

namespace {

constexpr double kProbabilityTolerance = 1e-12;

void require_distribution(const std::vector<double>& p, std::size_t expected, const char* what) {
  if (p.size() != expected)
    throw InvalidInput(std::string(what) + ": expected " + std::to_string(expected) + " probabilities, got " +
                       std::to_string(p.size()));
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidInput(std::string(what) + ": negative or non-finite probability");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kProbabilityTolerance)
    throw InvalidInput(std::string(what) + ": probabilities sum to " + std::to_string(sum) + ", not 1");
}

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput(std::string(what) + ": p_fail must lie in [0, 1]");
}

void require_set_on(const GraphSet& set, const Topology& topology) {
  if (set.graphs.empty()) throw InvalidInput("graph set is empty");
  if (set.topology.agents() != topology.agents() || set.topology.edge_count() != topology.edge_count())
    throw InvalidInput("graph set was built on a different topology");
}

}  // namespace

// ---------------------------------------------------------------------------
// EdgeMask

EdgeMask EdgeMask::single(std::size_t edge_count, std::size_t edge) {
  EdgeMask m(edge_count);
  m.set(edge);
  return m;
}

EdgeMask EdgeMask::all(std::size_t edge_count) {
  EdgeMask m(edge_count);
  for (std::size_t e = 0; e < edge_count; ++e) m.set(e);
  return m;
}

void EdgeMask::set(std::size_t e, bool on) {
  if (e >= size_) throw InvalidInput("EdgeMask: edge index out of range");
  const std::uint64_t bit = std::uint64_t{1} << (e % 64);
  if (on)
    words_[e / 64] |= bit;
  else
    words_[e / 64] &= ~bit;
}

std::size_t EdgeMask::count() const {
  std::size_t c = 0;
  for (std::uint64_t w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

bool EdgeMask::contains(const EdgeMask& other) const {
  if (other.size_ != size_) throw InvalidInput("EdgeMask: size mismatch");
  for (std::size_t k = 0; k < words_.size(); ++k)
    if ((other.words_[k] & ~words_[k]) != 0) return false;
  return true;
}

EdgeMask& EdgeMask::operator|=(const EdgeMask& other) {
  if (other.size_ != size_) throw InvalidInput("EdgeMask: size mismatch");
  for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= other.words_[k];
  return *this;
}

std::string EdgeMask::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  const std::size_t digits = std::max<std::size_t>(1, (size_ + 3) / 4);
  std::string out(digits, '0');
  for (std::size_t d = 0; d < digits; ++d) {
    unsigned nibble = 0;
    for (std::size_t b = 0; b < 4; ++b) {
      const std::size_t e = d * 4 + b;
      if (e < size_ && test(e)) nibble |= 1U << b;
    }
    out[digits - 1 - d] = kDigits[nibble];
  }
  return out;
}

EdgeMask EdgeMask::from_hex(std::size_t edge_count, const std::string& hex) {
  EdgeMask m(edge_count);
  const std::size_t digits = hex.size();
  for (std::size_t d = 0; d < digits; ++d) {
    const char c = hex[digits - 1 - d];
    unsigned nibble;
    if (c >= '0' && c <= '9')
      nibble = static_cast<unsigned>(c - '0');
    else if (c >= 'a' && c <= 'f')
      nibble = static_cast<unsigned>(c - 'a' + 10);
    else if (c >= 'A' && c <= 'F')
      nibble = static_cast<unsigned>(c - 'A' + 10);
    else
      throw InvalidInput("EdgeMask: invalid hex digit");
    for (std::size_t b = 0; b < 4; ++b) {
      if (!(nibble & (1U << b))) continue;
      const std::size_t e = d * 4 + b;
      if (e >= edge_count) throw InvalidInput("EdgeMask: hex sets a bit beyond the edge count");
      m.set(e);
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Topology

Topology::Topology(std::size_t agents, std::vector<Edge> edges, bool directed)
    : agents_(agents), edges_(std::move(edges)), directed_(directed) {
  if (agents_ == 0) throw InvalidInput("topology needs at least one agent");
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    Edge& edge = edges_[e];
    if (edge.from >= agents_ || edge.to >= agents_)
      throw InvalidInput("edge " + std::to_string(e) + " has a vertex index out of range");
    if (edge.from == edge.to) throw InvalidInput("edge " + std::to_string(e) + " is a self-loop");
    if (!directed_ && edge.from > edge.to) std::swap(edge.from, edge.to);
    for (std::size_t p = 0; p < e; ++p)
      if (edges_[p] == edge)
        throw InvalidInput("duplicate edge (" + std::to_string(edge.from + 1) + "," + std::to_string(edge.to + 1) + ")");
  }
}

Topology Topology::build(TopologyKind kind, std::size_t agents) {
  if (agents == 0) throw InvalidInput("topology needs at least one agent");
  std::vector<Edge> edges;
  switch (kind) {
    case TopologyKind::Line:
      for (std::size_t i = 0; i + 1 < agents; ++i) edges.push_back({i, i + 1});
      break;
    case TopologyKind::Ring:
      for (std::size_t i = 0; i + 1 < agents; ++i) edges.push_back({i, i + 1});
      // below three vertices the closing edge would duplicate (1,2)
      if (agents >= 3) edges.push_back({0, agents - 1});
      break;
    case TopologyKind::Complete:
      for (std::size_t i = 0; i < agents; ++i)
        for (std::size_t j = i + 1; j < agents; ++j) edges.push_back({i, j});
      break;
    case TopologyKind::Custom:
      throw InvalidInput("custom topologies are built from an explicit edge list");
  }
  return Topology(agents, std::move(edges), false);
}

std::size_t Topology::find_edge(std::size_t a, std::size_t b) const {
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const Edge& edge = edges_[e];
    if (edge.from == a && edge.to == b) return e;
    if (!directed_ && edge.from == b && edge.to == a) return e;
  }
  return edges_.size();
}

std::size_t Topology::max_degree() const {
  std::vector<std::size_t> degree(agents_, 0);
  for (const Edge& e : edges_) {
    ++degree[e.from];
    ++degree[e.to];
  }
  return agents_ == 0 ? 0 : *std::max_element(degree.begin(), degree.end());
}

Topology Topology::restrict_to(const EdgeMask& mask) const {
  if (mask.size() != edges_.size()) throw InvalidInput("restrict_to: mask size mismatch");
  std::vector<Edge> kept;
  for (std::size_t e = 0; e < edges_.size(); ++e)
    if (mask.test(e)) kept.push_back(edges_[e]);
  return Topology(agents_, std::move(kept), directed_);
}

bool Topology::connected() const {
  if (agents_ <= 1) return true;
  std::vector<std::vector<std::size_t>> forward(agents_), backward(agents_);
  for (const Edge& e : edges_) {
    forward[e.from].push_back(e.to);
    backward[e.to].push_back(e.from);
    if (!directed_) {
      forward[e.to].push_back(e.from);
      backward[e.from].push_back(e.to);
    }
  }
  auto reaches_all = [this](const std::vector<std::vector<std::size_t>>& adj) {
    std::vector<bool> seen(agents_, false);
    std::queue<std::size_t> frontier;
    frontier.push(0);
    seen[0] = true;
    std::size_t visited = 1;
    while (!frontier.empty()) {
      const std::size_t v = frontier.front();
      frontier.pop();
      for (std::size_t w : adj[v])
        if (!seen[w]) {
          seen[w] = true;
          ++visited;
          frontier.push(w);
        }
    }
    return visited == agents_;
  };
  return reaches_all(forward) && (!directed_ || reaches_all(backward));
}

// ---------------------------------------------------------------------------
// Graph sets

GraphSet single_link_graph_set(const Topology& topology) {
  if (topology.edge_count() == 0) throw InvalidInput("single_link_graph_set: topology has no edges");
  GraphSet set{topology, {}};
  set.graphs.reserve(topology.edge_count());
  for (std::size_t e = 0; e < topology.edge_count(); ++e)
    set.graphs.push_back(EdgeMask::single(topology.edge_count(), e));
  return set;
}

GraphSet make_graph_set(const Topology& topology, std::vector<EdgeMask> graphs) {
  if (graphs.empty()) throw InvalidInput("graph set is empty");
  for (const EdgeMask& g : graphs)
    if (g.size() != topology.edge_count()) throw InvalidInput("graph set member does not match the topology");
  return GraphSet{topology, std::move(graphs)};
}

EdgeMask union_mask(const GraphSet& set) {
  if (set.graphs.empty()) throw InvalidInput("union_graph: graph set is empty");
  EdgeMask u(set.topology.edge_count());
  for (const EdgeMask& g : set.graphs) u |= g;
  return u;
}

Topology union_graph(const GraphSet& set) { return set.topology.restrict_to(union_mask(set)); }

// ---------------------------------------------------------------------------
// Processes

void validate_process(const GraphProcessSpec& spec, const Topology& topology) {
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, IidCategorical>) {
          require_set_on(p.set, topology);
          require_distribution(p.probabilities, p.set.size(), "iid process");
        } else if constexpr (std::is_same_v<P, PerLinkBernoulli>) {
          require_probability(p.p_fail, "bernoulli process");
        } else if constexpr (std::is_same_v<P, MarkovChain>) {
          require_set_on(p.set, topology);
          require_distribution(p.initial, p.set.size(), "markov initial distribution");
          if (p.transition.size() != p.set.size()) throw InvalidInput("markov transition matrix must be square over the graph set");
          for (const auto& row : p.transition) require_distribution(row, p.set.size(), "markov transition row");
        } else {
          require_probability(p.p_fail, "min-occurrence process");
          if (p.window < 1) throw InvalidInput("min-occurrence process: window must be at least 1");
          if (topology.edge_count() == 0) throw InvalidInput("min-occurrence process: topology has no edges");
        }
      },
      spec);
}

GraphProcess::GraphProcess(Topology topology, GraphProcessSpec spec, std::uint64_t seed)
    : topology_(std::move(topology)), spec_(std::move(spec)), rng_(Rng::substream(seed, 0)),
      window_counts_(topology_.edge_count(), 0) {
  validate_process(spec_, topology_);
}

EdgeMask GraphProcess::bernoulli_mask(double p_fail) {
  EdgeMask mask(topology_.edge_count());
  for (std::size_t e = 0; e < topology_.edge_count(); ++e)
    if (rng_.uniform01() >= p_fail) mask.set(e);
  return mask;
}

std::size_t GraphProcess::draw_categorical(const std::vector<double>& probabilities) {
  const double u = rng_.uniform01();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < probabilities.size(); ++k) {
    if (probabilities[k] <= 0.0) continue;
    last_positive = k;
    cumulative += probabilities[k];
    if (u < cumulative) return k;
  }
  // rounding can leave the cumulative sum a hair below 1
  return last_positive;
}

GraphSample GraphProcess::next_sample(std::size_t t) {
  GraphSample sample{t, {}};
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, IidCategorical>) {
          sample.active = p.set.graphs[draw_categorical(p.probabilities)];
        } else if constexpr (std::is_same_v<P, PerLinkBernoulli>) {
          sample.active = bernoulli_mask(p.p_fail);
        } else if constexpr (std::is_same_v<P, MarkovChain>) {
          markov_state_ = started_ ? draw_categorical(p.transition[markov_state_]) : draw_categorical(p.initial);
          started_ = true;
          sample.active = p.set.graphs[markov_state_];
        } else {
          if (t > 0 && t % p.window == 0) {
            const std::size_t least = *std::min_element(window_counts_.begin(), window_counts_.end());
            std::vector<std::size_t> tied;
            for (std::size_t e = 0; e < window_counts_.size(); ++e)
              if (window_counts_[e] == least) tied.push_back(e);
            const std::size_t chosen = tied[rng_.uniform_index(tied.size())];
            std::fill(window_counts_.begin(), window_counts_.end(), 0);
            sample.active = EdgeMask::single(topology_.edge_count(), chosen);
          } else {
            sample.active = bernoulli_mask(p.p_fail);
          }
          for (std::size_t e = 0; e < window_counts_.size(); ++e)
            if (sample.active.test(e)) ++window_counts_[e];
        }
      },
      spec_);
  return sample;
}

OccurrenceCounts occurrence_counts(const std::vector<GraphSample>& samples, const GraphSet& set) {
  if (samples.empty()) throw InvalidInput("occurrence_counts: no samples");
  OccurrenceCounts out;
  out.per_graph.assign(set.size(), 0);
  out.per_edge.assign(set.topology.edge_count(), 0);
  for (const GraphSample& s : samples) {
    if (s.active.size() != set.topology.edge_count()) throw InvalidInput("occurrence_counts: sample does not match the topology");
    for (std::size_t g = 0; g < set.size(); ++g)
      if (s.active.contains(set.graphs[g])) ++out.per_graph[g];
    for (std::size_t e = 0; e < out.per_edge.size(); ++e)
      if (s.active.test(e)) ++out.per_edge[e];
  }
  if (!out.per_graph.empty()) out.min_graph = *std::min_element(out.per_graph.begin(), out.per_graph.end());
  if (!out.per_edge.empty()) out.min_edge = *std::min_element(out.per_edge.begin(), out.per_edge.end());
  return out;
}

}  // namespace fvpnet
