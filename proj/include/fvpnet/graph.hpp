#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "fvpnet/rng.hpp"

namespace fvpnet {

/// Vertex pair, 0-based. For undirected topologies i < j after normalization.
struct Edge {
  std::size_t from = 0;
  std::size_t to = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Dynamic bitset over topology edge indices.
class EdgeMask {
 public:
  EdgeMask() = default;
  explicit EdgeMask(std::size_t edge_count) : size_(edge_count), words_((edge_count + 63) / 64, 0) {}

  static EdgeMask single(std::size_t edge_count, std::size_t edge);
  static EdgeMask all(std::size_t edge_count);

  std::size_t size() const { return size_; }
  bool test(std::size_t e) const { return (words_[e / 64] >> (e % 64)) & 1U; }
  void set(std::size_t e, bool on = true);
  std::size_t count() const;
  bool none() const { return count() == 0; }
  /// Every bit of `other` is also set here.
  bool contains(const EdgeMask& other) const;
  EdgeMask& operator|=(const EdgeMask& other);

  /// Hex string, most significant nibble first, ceil(size/4) digits (at
  /// least one). Bit k corresponds to edge index k.
  std::string to_hex() const;
  static EdgeMask from_hex(std::size_t edge_count, const std::string& hex);

  friend bool operator==(const EdgeMask&, const EdgeMask&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

enum class TopologyKind { Line, Ring, Complete, Custom };

class Topology {
 public:
  Topology() = default;

  /// Validates: indices in range, no self-loops, no duplicates. Undirected
  /// edges are normalized to from < to; (i,j) and (j,i) count as duplicates.
  Topology(std::size_t agents, std::vector<Edge> edges, bool directed = false);

  static Topology build(TopologyKind kind, std::size_t agents);
  static Topology line(std::size_t agents) { return build(TopologyKind::Line, agents); }
  static Topology ring(std::size_t agents) { return build(TopologyKind::Ring, agents); }
  static Topology complete(std::size_t agents) { return build(TopologyKind::Complete, agents); }

  std::size_t agents() const { return agents_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(std::size_t e) const { return edges_[e]; }
  bool directed() const { return directed_; }

  /// Index of the edge joining (a, b), or edge_count() if absent. For
  /// undirected topologies orientation is ignored.
  std::size_t find_edge(std::size_t a, std::size_t b) const;

  /// Largest number of incident edges at any vertex (in + out for directed).
  std::size_t max_degree() const;

  /// Subgraph keeping only the edges set in `mask`; edge indices are renumbered.
  Topology restrict_to(const EdgeMask& mask) const;

  /// Reachability: connected when undirected, strongly connected when directed.
  /// A single vertex is connected.
  bool connected() const;

 private:
  std::size_t agents_ = 0;
  std::vector<Edge> edges_;
  bool directed_ = false;
};

/// The finite set of possible communication graphs. Each member is an edge
/// subset of a shared topology.
struct GraphSet {
  Topology topology;
  std::vector<EdgeMask> graphs;

  std::size_t size() const { return graphs.size(); }
};

/// One graph per topology edge, in edge order.
GraphSet single_link_graph_set(const Topology& topology);

/// Validates that every member mask fits the topology and the list is nonempty.
GraphSet make_graph_set(const Topology& topology, std::vector<EdgeMask> graphs);

/// Edge union of every member, as a topology on the same vertices.
Topology union_graph(const GraphSet& set);
EdgeMask union_mask(const GraphSet& set);

/// The graph realized at step t. An empty mask is legal (no communication).
struct GraphSample {
  std::size_t t = 0;
  EdgeMask active;
};

struct IidCategorical {
  GraphSet set;
  std::vector<double> probabilities;
};

struct PerLinkBernoulli {
  double p_fail = 0.5;
};

struct MarkovChain {
  GraphSet set;
  std::vector<std::vector<double>> transition;  // row-stochastic
  std::vector<double> initial;
};

/// Per-link Bernoulli, except at t = k*window (k >= 1) where the sample is the
/// single edge that was active least often during [(k-1)*window, k*window).
/// Ties are broken uniformly at random.
struct MinOccurrenceDependency {
  double p_fail = 0.5;
  std::size_t window = 20;
};

using GraphProcessSpec = std::variant<IidCategorical, PerLinkBernoulli, MarkovChain, MinOccurrenceDependency>;

/// Throws InvalidInput when probabilities, transition rows or the window are
/// malformed for the topology.
void validate_process(const GraphProcessSpec& spec, const Topology& topology);

/// Stateful sampler. Single owner; not safe to share while sampling.
class GraphProcess {
 public:
  GraphProcess(Topology topology, GraphProcessSpec spec, std::uint64_t seed);

  GraphSample next_sample(std::size_t t);

  const Topology& topology() const { return topology_; }
  const GraphProcessSpec& spec() const { return spec_; }
  /// Activations per edge inside the current dependency window.
  const std::vector<std::size_t>& window_counts() const { return window_counts_; }

 private:
  EdgeMask bernoulli_mask(double p_fail);
  std::size_t draw_categorical(const std::vector<double>& probabilities);

  Topology topology_;
  GraphProcessSpec spec_;
  Rng rng_;
  std::vector<std::size_t> window_counts_;
  std::size_t markov_state_ = 0;
  bool started_ = false;
};

struct OccurrenceCounts {
  std::vector<std::size_t> per_graph;  // member graph fully contained in the sample
  std::vector<std::size_t> per_edge;
  std::size_t min_graph = 0;
  std::size_t min_edge = 0;
};

OccurrenceCounts occurrence_counts(const std::vector<GraphSample>& samples, const GraphSet& set);

}  // namespace fvpnet
