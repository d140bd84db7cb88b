#include "seedforge/graph.hpp"

#include <map>
#include <set>
#include <unordered_map>

#include "seedforge/errors.hpp"
#include "seedforge/log.hpp"
#include "seedforge/text.hpp"

namespace seedforge {

GraphStats graph_stats(const ReasoningGraph& g) {
  GraphStats s;
  s.n_nodes = static_cast<int>(g.nodes.size());
  // simple undirected projection: distinct unordered endpoint pairs
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& e : g.edges) {
    auto p = e.src < e.dst ? std::make_pair(e.src, e.dst) : std::make_pair(e.dst, e.src);
    pairs.insert(std::move(p));
  }
  s.n_edges = static_cast<int>(pairs.size());
  if (s.n_nodes >= 2) {
    s.density = 2.0 * s.n_edges / (static_cast<double>(s.n_nodes) * (s.n_nodes - 1));
  }
  if (s.n_nodes >= 1) {
    s.avg_degree = 2.0 * s.n_edges / s.n_nodes;
  }
  return s;
}

EquivalenceMode equivalence_mode_from_name(const std::string& name) {
  if (name == "strict") return EquivalenceMode::strict;
  if (name == "relaxed") return EquivalenceMode::relaxed;
  raise(ErrorCode::parse, "unknown equivalence mode: " + name);
}

const char* equivalence_mode_name(EquivalenceMode mode) {
  return mode == EquivalenceMode::strict ? "strict" : "relaxed";
}

const char* equivalence_failure_name(EquivalenceFailure f) {
  switch (f) {
    case EquivalenceFailure::node_count: return "node_count";
    case EquivalenceFailure::edge_count: return "edge_count";
    case EquivalenceFailure::degree_sequence: return "degree_sequence";
    case EquivalenceFailure::no_isomorphism: return "no_isomorphism";
    case EquivalenceFailure::relation_labels: return "relation_labels";
  }
  return "?";
}

ReasoningGraph build_context_graph(const std::vector<Triplet>& triplets) {
  std::vector<GraphNode> nodes;
  std::unordered_map<std::string, std::string> id_by_key;  // entity key -> node id
  auto intern = [&](const Entity& e) -> std::string {
    std::string key = text::entity_key(e.surface) + "\x1f" + e.semantic_type;
    auto it = id_by_key.find(key);
    if (it != id_by_key.end()) return it->second;
    std::string id = "n" + std::to_string(nodes.size());
    nodes.push_back({id, e});
    id_by_key.emplace(std::move(key), id);
    return id;
  };
  std::vector<GraphEdge> edges;
  for (const auto& t : triplets) {
    std::string s = intern(t.subject);
    std::string o = intern(t.object);
    edges.push_back({s, t.relation, o});
  }
  return ReasoningGraph::build(GraphKind::context_graph, std::move(nodes), std::move(edges));
}

std::vector<Triplet> cyclic_perturbation(const std::vector<Triplet>& triplets, int shift,
                                         std::vector<PerturbationNote>* notes) {
  if (shift < 0) raise(ErrorCode::invalid_argument, "shift must be >= 0");
  std::size_t n = triplets.size();
  // k ≡ 0 (mod n) and degenerate lists are the identity
  if (n <= 1 || shift % static_cast<int>(n) == 0) return triplets;
  std::vector<Triplet> out = triplets;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = (i + static_cast<std::size_t>(shift)) % n;
    const Entity* obj = &triplets[j].object;
    if (text::entity_key(obj->surface) == text::entity_key(triplets[i].subject.surface)) {
      // self-pairing: take the next object along
      std::size_t j2 = (j + 1) % n;
      obj = &triplets[j2].object;
      if (notes) notes->push_back({i, 1});
      log::debug("cyclic_perturbation: self-pairing at triplet " + std::to_string(i) +
                 ", shifted one extra position");
    }
    out[i].object = *obj;
  }
  return out;
}

}  // namespace seedforge
