#include "fvpnet/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "toml_lite.hpp"

namespace fvpnet {

using toml_lite::Value;

namespace {

std::string join_issues(const std::string& source, const std::vector<ConfigIssue>& issues) {
  std::ostringstream out;
  for (std::size_t k = 0; k < issues.size(); ++k) {
    if (k) out << '\n';
    out << source;
    if (issues[k].line > 0) out << ':' << issues[k].line;
    out << ": ";
    if (!issues[k].key.empty()) out << issues[k].key << ": ";
    out << issues[k].message;
  }
  return out.str();
}

/// Typed access to the parsed document. Every lookup marks the key as used;
/// keys never looked up are reported as unknown.
class Reader {
 public:
  Reader(toml_lite::Document doc, std::filesystem::path base_dir) : doc_(std::move(doc)), base_(std::move(base_dir)) {
    for (const auto& issue : doc_.issues) issues_.push_back({issue.line, "", issue.message});
  }

  bool has(const std::string& key) const { return doc_.entries.count(key) != 0; }

  int line_of(const std::string& key) const {
    auto it = doc_.entries.find(key);
    return it == doc_.entries.end() ? 0 : it->second.line;
  }

  void error(const std::string& key, const std::string& message) { issues_.push_back({line_of(key), key, message}); }

  const Value* find(const std::string& key, Value::Kind kind) {
    used_.insert(key);
    auto it = doc_.entries.find(key);
    if (it == doc_.entries.end()) return nullptr;
    if (it->second.kind != kind) {
      error(key, std::string("expected ") + toml_lite::kind_name(kind) + ", got " +
                     toml_lite::kind_name(it->second.kind));
      return nullptr;
    }
    return &it->second;
  }

  std::optional<double> number(const std::string& key, bool required = false) {
    const Value* v = find(key, Value::Kind::Number);
    if (!v) {
      if (required && !has(key)) error(key, "required key is missing");
      return std::nullopt;
    }
    if (!std::isfinite(v->number)) {
      error(key, "must be finite");
      return std::nullopt;
    }
    return v->number;
  }

  double number_or(const std::string& key, double fallback) { return number(key).value_or(fallback); }

  std::optional<std::uint64_t> count(const std::string& key, bool required = false) {
    const Value* v = find(key, Value::Kind::Number);
    if (!v) {
      if (required && !has(key)) error(key, "required key is missing");
      return std::nullopt;
    }
    if (!v->integral || v->number < 0.0 || v->number > 9.007199254740992e15) {
      error(key, "expected a non-negative integer");
      return std::nullopt;
    }
    return static_cast<std::uint64_t>(v->number);
  }

  std::optional<std::string> string(const std::string& key, bool required = false) {
    const Value* v = find(key, Value::Kind::String);
    if (!v) {
      if (required && !has(key)) error(key, "required key is missing");
      return std::nullopt;
    }
    return v->text;
  }

  bool boolean_or(const std::string& key, bool fallback) {
    const Value* v = find(key, Value::Kind::Bool);
    return v ? v->boolean : fallback;
  }

  std::optional<std::vector<double>> numbers(const std::string& key) {
    const Value* v = find(key, Value::Kind::Array);
    if (!v) return std::nullopt;
    std::vector<double> out;
    for (const Value& item : v->items) {
      if (item.kind != Value::Kind::Number) {
        error(key, "expected an array of numbers");
        return std::nullopt;
      }
      out.push_back(item.number);
    }
    return out;
  }

  std::optional<std::vector<std::vector<double>>> matrix(const std::string& key) {
    const Value* v = find(key, Value::Kind::Array);
    if (!v) return std::nullopt;
    std::vector<std::vector<double>> out;
    for (const Value& row : v->items) {
      if (row.kind != Value::Kind::Array) {
        error(key, "expected an array of arrays");
        return std::nullopt;
      }
      std::vector<double> r;
      for (const Value& item : row.items) {
        if (item.kind != Value::Kind::Number) {
          error(key, "expected numbers inside the nested arrays");
          return std::nullopt;
        }
        r.push_back(item.number);
      }
      out.push_back(std::move(r));
    }
    return out;
  }

  std::optional<std::vector<std::string>> strings(const std::string& key) {
    const Value* v = find(key, Value::Kind::Array);
    if (!v) return std::nullopt;
    std::vector<std::string> out;
    for (const Value& item : v->items) {
      if (item.kind != Value::Kind::String) {
        error(key, "expected an array of strings");
        return std::nullopt;
      }
      out.push_back(item.text);
    }
    return out;
  }

  std::filesystem::path resolve(const std::string& p) const {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base_ / path;
  }

  void report_unknown() {
    for (const auto& [key, value] : doc_.entries)
      if (!used_.count(key)) issues_.push_back({value.line, key, "unknown key"});
  }

  std::vector<ConfigIssue>& issues() { return issues_; }
  bool clean() const { return issues_.empty(); }

 private:
  toml_lite::Document doc_;
  std::filesystem::path base_;
  std::set<std::string> used_;
  std::vector<ConfigIssue> issues_;
};

std::optional<std::vector<std::size_t>> one_based_indices(Reader& r, const std::string& key,
                                                          const std::vector<double>& raw, std::size_t limit) {
  std::vector<std::size_t> out;
  for (double v : raw) {
    if (v != std::floor(v) || v < 1.0 || v > static_cast<double>(limit)) {
      r.error(key, "index " + std::to_string(v) + " is outside 1.." + std::to_string(limit));
      return std::nullopt;
    }
    out.push_back(static_cast<std::size_t>(v) - 1);
  }
  return out;
}

std::optional<Topology> read_topology(Reader& r) {
  const auto kind = r.string("topology.kind", true);
  const auto agents = r.count("topology.agents", true);
  const bool directed = r.boolean_or("topology.directed", false);
  const auto edges = r.matrix("topology.edges");
  if (!kind || !agents) return std::nullopt;
  if (*agents < 1) {
    r.error("topology.agents", "need at least one agent");
    return std::nullopt;
  }
  try {
    if (*kind == "custom") {
      if (!edges) {
        r.error("topology.edges", "custom topology needs an edge list");
        return std::nullopt;
      }
      std::vector<Edge> list;
      for (const auto& e : *edges) {
        if (e.size() != 2) {
          r.error("topology.edges", "each edge is a pair [i, j]");
          return std::nullopt;
        }
        const auto idx = one_based_indices(r, "topology.edges", e, *agents);
        if (!idx) return std::nullopt;
        list.push_back({(*idx)[0], (*idx)[1]});
      }
      return Topology(*agents, std::move(list), directed);
    }
    if (edges) r.error("topology.edges", "only allowed with kind = \"custom\"");
    if (directed) r.error("topology.directed", "only custom topologies can be directed");
    if (*kind == "line") return Topology::line(*agents);
    if (*kind == "ring") return Topology::ring(*agents);
    if (*kind == "complete") return Topology::complete(*agents);
    r.error("topology.kind", "expected line, ring, complete or custom; got '" + *kind + "'");
  } catch (const Error& e) {
    r.error("topology.edges", e.what());
  }
  return std::nullopt;
}

std::optional<GraphSet> read_graph_set(Reader& r, const Topology& topo) {
  const std::string mode = r.string("process.graph_set").value_or("single_link");
  const auto graphs = r.matrix("process.graphs");
  try {
    if (mode == "single_link") {
      if (graphs) r.error("process.graphs", "only allowed with graph_set = \"explicit\"");
      if (topo.edge_count() == 0) return GraphSet{topo, {EdgeMask(0)}};
      return single_link_graph_set(topo);
    }
    if (mode == "explicit") {
      if (!graphs || graphs->empty()) {
        r.error("process.graphs", "explicit graph set needs a nonempty list of edge-index lists");
        return std::nullopt;
      }
      std::vector<EdgeMask> masks;
      for (const auto& g : *graphs) {
        const auto idx = one_based_indices(r, "process.graphs", g, topo.edge_count());
        if (!idx) return std::nullopt;
        EdgeMask m(topo.edge_count());
        for (std::size_t e : *idx) m.set(e);
        masks.push_back(std::move(m));
      }
      return make_graph_set(topo, std::move(masks));
    }
    r.error("process.graph_set", "expected single_link or explicit; got '" + mode + "'");
  } catch (const Error& e) {
    r.error("process.graphs", e.what());
  }
  return std::nullopt;
}

std::optional<GraphProcessSpec> read_process(Reader& r, const GraphSet& set) {
  const auto kind = r.string("process.kind", true);
  const auto p_fail = r.number("process.p_fail");
  const auto window = r.count("process.window");
  const auto probs = r.numbers("process.probabilities");
  const auto transition = r.matrix("process.transition");
  const auto initial = r.numbers("process.initial");
  if (!kind) return std::nullopt;
  auto forbid = [&r](bool present, const std::string& key, const std::string& kind_name) {
    if (present) r.error(key, "not used by process kind '" + kind_name + "'");
  };
  if (*kind == "bernoulli") {
    forbid(window.has_value(), "process.window", *kind);
    forbid(probs.has_value(), "process.probabilities", *kind);
    forbid(transition.has_value() || initial.has_value(), "process.transition", *kind);
    return PerLinkBernoulli{p_fail.value_or(0.5)};
  }
  if (*kind == "min_occurrence") {
    forbid(probs.has_value(), "process.probabilities", *kind);
    forbid(transition.has_value() || initial.has_value(), "process.transition", *kind);
    return MinOccurrenceDependency{p_fail.value_or(0.5), static_cast<std::size_t>(window.value_or(20))};
  }
  if (*kind == "iid") {
    forbid(p_fail.has_value(), "process.p_fail", *kind);
    forbid(window.has_value(), "process.window", *kind);
    std::vector<double> p = probs.value_or(std::vector<double>(set.size(), 1.0 / static_cast<double>(set.size())));
    return IidCategorical{set, std::move(p)};
  }
  if (*kind == "markov") {
    forbid(p_fail.has_value(), "process.p_fail", *kind);
    forbid(window.has_value(), "process.window", *kind);
    if (!transition) {
      r.error("process.transition", "markov process needs a transition matrix");
      return std::nullopt;
    }
    std::vector<double> init = initial.value_or(std::vector<double>(set.size(), 1.0 / static_cast<double>(set.size())));
    return MarkovChain{set, *transition, std::move(init)};
  }
  r.error("process.kind", "expected bernoulli, min_occurrence, iid or markov; got '" + *kind + "'");
  return std::nullopt;
}

std::optional<WeightModel> read_weight(Reader& r) {
  const auto kind = r.string("weight.kind", true);
  const auto q = r.number("weight.Q");
  const auto sigma = r.number("weight.sigma");
  const auto beta_w = r.number("weight.beta_w");
  const auto c = r.number("weight.c");
  if (!kind) return std::nullopt;
  if (*kind == "cucker_smale") {
    if (c) r.error("weight.c", "only used by kind = \"constant\"");
    return CuckerSmale{q.value_or(0.25), sigma.value_or(1.0), beta_w.value_or(1.0)};
  }
  if (*kind == "log_distance") {
    if (sigma || beta_w || c) r.error("weight.kind", "log_distance takes only Q");
    return LogDistance{q.value_or(0.25)};
  }
  if (*kind == "constant") {
    if (q || sigma || beta_w) r.error("weight.kind", "constant takes only c");
    if (!c) {
      r.error("weight.c", "required key is missing");
      return std::nullopt;
    }
    return ConstantWeight{*c};
  }
  r.error("weight.kind", "expected cucker_smale, log_distance or constant; got '" + *kind + "'");
  return std::nullopt;
}

std::optional<StackedState> state_from_rows(Reader& r, const std::string& key, const std::filesystem::path& path,
                                            std::size_t agents) {
  try {
    const auto rows = read_numeric_csv(path);
    if (rows.size() != agents) {
      r.error(key, path.string() + ": expected " + std::to_string(agents) + " rows, got " + std::to_string(rows.size()));
      return std::nullopt;
    }
    const std::size_t n = rows.front().size();
    std::vector<double> values;
    for (const auto& row : rows) {
      if (row.size() != n || n == 0) {
        r.error(key, path.string() + ": rows must all have the same nonzero column count");
        return std::nullopt;
      }
      values.insert(values.end(), row.begin(), row.end());
    }
    return StackedState(agents, n, std::move(values));
  } catch (const Error& e) {
    r.error(key, e.what());
  }
  return std::nullopt;
}

std::optional<StackedState> read_initial(Reader& r, std::size_t agents) {
  const std::string kind = r.string("initial.kind").value_or("circle");
  const auto radius = r.number("initial.radius");
  const auto divisions = r.number("initial.divisions");
  const auto path = r.string("initial.path");
  if (kind == "circle") {
    if (path) r.error("initial.path", "only used by kind = \"file\"");
    const double rad = radius.value_or(10.0);
    const double div = divisions.value_or(22.0);
    if (!(div > 0.0)) {
      r.error("initial.divisions", "must be positive");
      return std::nullopt;
    }
    return circle_layout(agents, rad, div);
  }
  if (kind == "file") {
    if (!path) {
      r.error("initial.path", "required when kind = \"file\"");
      return std::nullopt;
    }
    return state_from_rows(r, "initial.path", r.resolve(*path), agents);
  }
  r.error("initial.kind", "expected circle or file; got '" + kind + "'");
  return std::nullopt;
}

std::shared_ptr<const Objective> read_objective(Reader& r, const StackedState& x0) {
  const std::string kind = r.string("objective.kind").value_or("quadratic");
  const std::string anchors_src = r.string("objective.anchors").value_or("from_initial_positions");
  const auto curvature = r.numbers("objective.curvature");
  const auto rho = r.number("objective.rho");
  const auto lipschitz = r.number("objective.K");

  std::optional<StackedState> anchors;
  if (anchors_src == "from_initial_positions")
    anchors = x0;
  else
    anchors = state_from_rows(r, "objective.anchors", r.resolve(anchors_src), x0.agents());
  if (!anchors) return nullptr;
  if (anchors->dim() != x0.dim()) {
    r.error("objective.anchors", "anchor dimension differs from the initial state dimension");
    return nullptr;
  }
  try {
    if (kind == "quadratic") {
      if (curvature) r.error("objective.curvature", "only used by kind = \"custom\"");
      if (rho && *rho != 1.0) r.error("objective.rho", "quadratic objective has rho = 1");
      if (lipschitz && *lipschitz != 1.0) r.error("objective.K", "quadratic objective has K = 1");
      return std::make_shared<QuadraticObjective>(*anchors);
    }
    if (kind == "custom") {
      if (!curvature) r.error("objective.curvature", "required key is missing");
      if (!rho) r.error("objective.rho", "custom objectives must declare rho");
      if (!lipschitz) r.error("objective.K", "custom objectives must declare K");
      if (!curvature || !rho || !lipschitz) return nullptr;
      return std::make_shared<DiagonalQuadraticObjective>(*anchors, *curvature, *rho, *lipschitz);
    }
    r.error("objective.kind", "expected quadratic or custom; got '" + kind + "'");
  } catch (const Error& e) {
    r.error("objective.kind", e.what());
  }
  return nullptr;
}

std::optional<AlgorithmConfig> read_algorithm(Reader& r) {
  AlgorithmConfig cfg;
  const auto eta = r.number("algo.eta", true);
  const auto beta = r.number("algo.beta", true);
  const auto zeta = r.number("algo.zeta");
  const std::string schedule = r.string("algo.schedule").value_or("diminishing");
  const auto horizon = r.count("algo.horizon", true);
  const auto seed = r.count("algo.seed");
  const auto record_every = r.count("algo.record_every");
  if (schedule == "diminishing") {
    cfg.zeta = zeta.value_or(1.0);
  } else if (schedule == "zero") {
    if (zeta) r.error("algo.zeta", "not used with schedule = \"zero\"");
    cfg.zeta.reset();
  } else {
    r.error("algo.schedule", "expected diminishing or zero; got '" + schedule + "'");
  }
  if (!eta || !beta || !horizon) return std::nullopt;
  cfg.eta = *eta;
  cfg.beta = *beta;
  cfg.horizon = *horizon;
  cfg.seed = seed.value_or(1);
  cfg.record_every = record_every.value_or(10);
  return cfg;
}

// maps a validation exception back to the key most likely responsible
std::string key_for_message(const std::string& msg) {
  if (msg.find("algo.eta") != std::string::npos) return "algo.eta";
  if (msg.find("algo.beta") != std::string::npos || msg.find("beta") != std::string::npos) return "algo.beta";
  if (msg.find("algo.zeta") != std::string::npos) return "algo.zeta";
  if (msg.find("record_every") != std::string::npos) return "algo.record_every";
  if (msg.find("process") != std::string::npos || msg.find("markov") != std::string::npos ||
      msg.find("iid") != std::string::npos)
    return "process.kind";
  if (msg.find("weight") != std::string::npos || msg.find("cucker") != std::string::npos ||
      msg.find("log_distance") != std::string::npos || msg.find("constant") != std::string::npos ||
      msg.find("degree") != std::string::npos)
    return "weight.kind";
  return "";
}

}  // namespace

ConfigError::ConfigError(std::string source, std::vector<ConfigIssue> issues)
    : Error(join_issues(source, issues)), source_(std::move(source)), issues_(std::move(issues)) {}

const std::vector<std::string>& known_check_names() {
  static const std::vector<std::string> names = {
      "doubly_stochastic", "norm_bound",  "fixed_value_points", "quasi_nonexpansive", "lemma4",
      "connectivity",      "contraction", "constants",          "occurrence",         "boundedness"};
  return names;
}

std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw IoError(path.string() + ": not a number: '" + cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError(path.string() + ": no data rows");
  return rows;
}

ScenarioConfig parse_config_text(const std::string& text, const std::string& source,
                                 const std::filesystem::path& base_dir) {
  Reader r(toml_lite::parse(text), base_dir);
  ScenarioConfig cfg;
  cfg.source = source;

  const auto topology = read_topology(r);
  std::optional<GraphSet> set;
  std::optional<GraphProcessSpec> process;
  if (topology) {
    set = read_graph_set(r, *topology);
    if (set) process = read_process(r, *set);
  }
  const auto weight = read_weight(r);
  std::optional<StackedState> x0;
  if (topology) x0 = read_initial(r, topology->agents());
  std::shared_ptr<const Objective> objective;
  if (x0) objective = read_objective(r, *x0);
  const auto algo = read_algorithm(r);

  // output paths stay relative to the working directory
  cfg.output.dir = r.string("output.dir").value_or("out");
  cfg.output.states = r.boolean_or("output.states", true);
  cfg.output.plots = r.boolean_or("output.plots", true);
  cfg.output.dump_mixing = r.boolean_or("output.dump_mixing", false);

  if (auto names = r.strings("checks.run")) {
    for (const auto& n : *names)
      if (std::find(known_check_names().begin(), known_check_names().end(), n) == known_check_names().end())
        r.error("checks.run", "unknown check '" + n + "'");
    cfg.checks.names = std::move(*names);
  }
  cfg.checks.samples = r.count("checks.samples").value_or(1000);
  cfg.checks.state_scale = r.number_or("checks.state_scale", 10.0);
  cfg.checks.etas = r.numbers("checks.etas").value_or(std::vector<double>{});
  cfg.checks.occurrence_steps = r.count("checks.occurrence_steps").value_or(10000);
  cfg.checks.connectivity_states = r.count("checks.connectivity_states").value_or(100);
  for (double eta : cfg.checks.etas)
    if (!(eta > 0.0 && eta < 1.0)) r.error("checks.etas", "every eta must lie in (0, 1)");

  r.report_unknown();

  // cross-field validation only once every field parsed
  if (r.clean() && topology && set && process && weight && x0 && objective && algo) {
    cfg.scenario.topology = *topology;
    cfg.scenario.process = *process;
    cfg.scenario.weight = *weight;
    cfg.scenario.objective = objective;
    cfg.scenario.algo = *algo;
    cfg.scenario.x0 = *x0;
    cfg.graph_set = *set;
    try {
      validate_scenario(cfg.scenario);
    } catch (const Error& e) {
      const std::string key = key_for_message(e.what());
      r.error(key, e.what());
    }
  } else if (r.clean()) {
    r.error("", "incomplete scenario");
  }
  if (!r.clean()) throw ConfigError(source, std::move(r.issues()));
  return cfg;
}

ScenarioConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string(), path.parent_path().empty() ? "." : path.parent_path());
}

}  // namespace fvpnet
