#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "seedforge/errors.hpp"
#include "seedforge/graph.hpp"
#include "seedforge/text.hpp"

namespace seedforge {

namespace {

// Index-based view of a ReasoningGraph for the search. Edge labels are
// interned relation ids; node labels interned semantic types.
struct FlatGraph {
  int n = 0;
  std::vector<int> node_label;                       // -1 in relaxed mode
  std::vector<std::vector<std::pair<int, int>>> out; // (dst, rel)
  std::vector<std::vector<std::pair<int, int>>> in;  // (src, rel)
  std::vector<int> out_degree;
  std::vector<int> in_degree;
  std::vector<std::string> node_ids;
};

struct Interner {
  std::unordered_map<std::string, int> ids;
  int intern(const std::string& s) {
    auto [it, inserted] = ids.emplace(s, static_cast<int>(ids.size()));
    return it->second;
  }
};

FlatGraph flatten(const ReasoningGraph& g, EquivalenceMode mode, Interner& types,
                  Interner& relations) {
  FlatGraph f;
  f.n = static_cast<int>(g.nodes.size());
  f.node_label.resize(f.n, -1);
  f.out.resize(f.n);
  f.in.resize(f.n);
  f.out_degree.assign(f.n, 0);
  f.in_degree.assign(f.n, 0);
  std::unordered_map<std::string, int> index_of;
  for (int i = 0; i < f.n; ++i) {
    index_of[g.nodes[i].id] = i;
    f.node_ids.push_back(g.nodes[i].id);
    if (mode == EquivalenceMode::strict) {
      f.node_label[i] = types.intern(g.nodes[i].entity.semantic_type);
    }
  }
  for (const auto& e : g.edges) {
    int s = index_of.at(e.src);
    int d = index_of.at(e.dst);
    int rel = mode == EquivalenceMode::strict ? relations.intern(e.relation) : 0;
    f.out[s].emplace_back(d, rel);
    f.in[d].emplace_back(s, rel);
    ++f.out_degree[s];
    ++f.in_degree[d];
  }
  for (auto& v : f.out) std::sort(v.begin(), v.end());
  for (auto& v : f.in) std::sort(v.begin(), v.end());
  return f;
}

// multiset of relation ids between a fixed ordered pair
std::vector<int> relations_between(const FlatGraph& g, int src, int dst) {
  std::vector<int> rels;
  for (const auto& [d, r] : g.out[src]) {
    if (d == dst) rels.push_back(r);
  }
  return rels;  // sorted because g.out is sorted by (dst, rel)
}

class Vf2Search {
 public:
  Vf2Search(const FlatGraph& a, const FlatGraph& b) : a_(a), b_(b) {
    map_ab_.assign(a_.n, -1);
    map_ba_.assign(b_.n, -1);
    order_.resize(a_.n);
    std::iota(order_.begin(), order_.end(), 0);
    // high-degree nodes first constrains the search fastest
    std::sort(order_.begin(), order_.end(), [this](int x, int y) {
      int dx = a_.out_degree[x] + a_.in_degree[x];
      int dy = a_.out_degree[y] + a_.in_degree[y];
      if (dx != dy) return dx > dy;
      return x < y;
    });
  }

  bool run() { return extend(0); }

  const std::vector<int>& mapping() const { return map_ab_; }

 private:
  bool feasible(int u, int v) const {
    if (a_.node_label[u] != b_.node_label[v]) return false;
    if (a_.out_degree[u] != b_.out_degree[v]) return false;
    if (a_.in_degree[u] != b_.in_degree[v]) return false;
    // edges to already-mapped neighbours must correspond exactly
    for (const auto& [dst, rel] : a_.out[u]) {
      int mv = map_ab_[dst];
      if (mv < 0) continue;
      if (relations_between(a_, u, dst) != relations_between(b_, v, mv)) return false;
    }
    for (const auto& [src, rel] : a_.in[u]) {
      int mv = map_ab_[src];
      if (mv < 0) continue;
      if (relations_between(a_, src, u) != relations_between(b_, mv, v)) return false;
    }
    // counts must match in reverse too: v's mapped neighbours must all be
    // neighbours of u (covered by checking v's mapped adjacency)
    for (const auto& [dst, rel] : b_.out[v]) {
      int mu = map_ba_[dst];
      if (mu < 0) continue;
      if (relations_between(b_, v, dst) != relations_between(a_, u, mu)) return false;
    }
    for (const auto& [src, rel] : b_.in[v]) {
      int mu = map_ba_[src];
      if (mu < 0) continue;
      if (relations_between(b_, src, v) != relations_between(a_, mu, u)) return false;
    }
    return true;
  }

  bool extend(std::size_t depth) {
    if (depth == order_.size()) return true;
    int u = order_[depth];
    for (int v = 0; v < b_.n; ++v) {
      if (map_ba_[v] >= 0) continue;
      if (!feasible(u, v)) continue;
      map_ab_[u] = v;
      map_ba_[v] = u;
      if (extend(depth + 1)) return true;
      map_ab_[u] = -1;
      map_ba_[v] = -1;
    }
    return false;
  }

  const FlatGraph& a_;
  const FlatGraph& b_;
  std::vector<int> map_ab_;
  std::vector<int> map_ba_;
  std::vector<int> order_;
};

EquivalenceReport fail(EquivalenceFailure reason) {
  EquivalenceReport r;
  r.equivalent = false;
  r.failure_reason = reason;
  return r;
}

}  // namespace

EquivalenceReport structurally_equivalent(const ReasoningGraph& g1,
                                          const ReasoningGraph& g2,
                                          EquivalenceMode mode, int node_budget) {
  if (g1.kind != g2.kind) {
    raise(ErrorCode::invalid_argument, "cannot compare graphs of different kinds");
  }
  if (static_cast<int>(g1.nodes.size()) > node_budget &&
      static_cast<int>(g2.nodes.size()) > node_budget) {
    raise(ErrorCode::size_limit,
          "graphs exceed the search budget of " + std::to_string(node_budget) + " nodes");
  }

  if (g1.nodes.size() != g2.nodes.size()) return fail(EquivalenceFailure::node_count);
  if (g1.edges.size() != g2.edges.size()) return fail(EquivalenceFailure::edge_count);

  if (mode == EquivalenceMode::strict) {
    auto relation_multiset = [](const ReasoningGraph& g) {
      std::vector<std::string> rels;
      for (const auto& e : g.edges) rels.push_back(e.relation);
      std::sort(rels.begin(), rels.end());
      return rels;
    };
    if (relation_multiset(g1) != relation_multiset(g2)) {
      return fail(EquivalenceFailure::relation_labels);
    }
  }

  Interner types, relations;
  FlatGraph a = flatten(g1, mode, types, relations);
  FlatGraph b = flatten(g2, mode, types, relations);

  auto degree_pairs = [](const FlatGraph& f) {
    std::vector<std::pair<int, int>> d;
    for (int i = 0; i < f.n; ++i) d.emplace_back(f.out_degree[i], f.in_degree[i]);
    std::sort(d.begin(), d.end());
    return d;
  };
  if (degree_pairs(a) != degree_pairs(b)) return fail(EquivalenceFailure::degree_sequence);

  if (mode == EquivalenceMode::strict) {
    auto label_multiset = [](const FlatGraph& f) {
      std::vector<int> l = f.node_label;
      std::sort(l.begin(), l.end());
      return l;
    };
    if (label_multiset(a) != label_multiset(b)) {
      return fail(EquivalenceFailure::no_isomorphism);
    }
  }

  Vf2Search search(a, b);
  if (!search.run()) return fail(EquivalenceFailure::no_isomorphism);

  EquivalenceReport r;
  r.equivalent = true;
  std::vector<std::pair<std::string, std::string>> witness;
  for (int u = 0; u < a.n; ++u) {
    witness.emplace_back(a.node_ids[u], b.node_ids[search.mapping()[u]]);
  }
  r.witness = std::move(witness);
  return r;
}

}  // namespace seedforge
