#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "seedforge/model.hpp"

namespace seedforge {

struct GraphStats {
  int n_nodes = 0;
  int n_edges = 0;
  double density = 0.0;
  double avg_degree = 0.0;

  bool operator==(const GraphStats&) const = default;
};

// Counts and density/degree over the simple undirected projection of the
// graph (distinct unordered endpoint pairs), which is what keeps density
// inside [0,1] for directed multi-relation graphs.
GraphStats graph_stats(const ReasoningGraph& g);

enum class EquivalenceMode { strict, relaxed };

EquivalenceMode equivalence_mode_from_name(const std::string& name);
const char* equivalence_mode_name(EquivalenceMode mode);

enum class EquivalenceFailure {
  node_count,
  edge_count,
  degree_sequence,
  no_isomorphism,
  relation_labels,
};

const char* equivalence_failure_name(EquivalenceFailure f);

struct EquivalenceReport {
  bool equivalent = false;
  // g1 node id -> g2 node id, present iff equivalent.
  std::optional<std::vector<std::pair<std::string, std::string>>> witness;
  std::optional<EquivalenceFailure> failure_reason;
};

// Label-respecting (strict: semantic_type node labels + relation edge
// labels) or unlabeled directed multigraph (relaxed) isomorphism. Fast
// rejections run before the VF2-style backtracking search. Throws
// Error(size_limit) when both graphs exceed `node_budget` nodes; throws
// Error(invalid_argument) when kinds differ.
EquivalenceReport structurally_equivalent(const ReasoningGraph& g1,
                                          const ReasoningGraph& g2,
                                          EquivalenceMode mode,
                                          int node_budget = 64);

// Nodes = distinct entities (by normalized surface + type), one edge per
// distinct (subject, relation, object); self-relations dropped.
ReasoningGraph build_context_graph(const std::vector<Triplet>& triplets);

struct PerturbationNote {
  std::size_t triplet_index = 0;
  std::size_t extra_shift = 1;
};

// Cyclic object rewiring: subject_i keeps relation_i and receives
// object_{(i+k) mod n}. A shift that would self-pair a triplet is bumped by
// one extra position for that triplet; each repair is reported in `notes`.
std::vector<Triplet> cyclic_perturbation(const std::vector<Triplet>& triplets,
                                         int shift,
                                         std::vector<PerturbationNote>* notes = nullptr);

}  // namespace seedforge
