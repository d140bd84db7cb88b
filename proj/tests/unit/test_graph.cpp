#include <doctest.h>

#include <algorithm>
#include <random>

#include "seedforge/errors.hpp"
#include "seedforge/graph.hpp"
#include "support/oracle.hpp"

using namespace seedforge;
using seedforge::testing::isomorphic_brute_force;
using seedforge::testing::perturbed_copy;
using seedforge::testing::random_graph;
using seedforge::testing::relabeled_copy;

namespace {

ReasoningGraph chain3() {
  return ReasoningGraph::build(
      GraphKind::context_graph,
      {{"a", {"A", "t", {}}}, {"b", {"B", "t", {}}}, {"c", {"C", "t", {}}}},
      {{"a", "r1", "b"}, {"b", "r2", "c"}});
}

ReasoningGraph cycle3() {
  return ReasoningGraph::build(
      GraphKind::context_graph,
      {{"a", {"A", "t", {}}}, {"b", {"B", "t", {}}}, {"c", {"C", "t", {}}}},
      {{"a", "r1", "b"}, {"b", "r2", "c"}, {"c", "r3", "a"}});
}

Triplet triplet(const std::string& s, const std::string& r, const std::string& o,
                const std::string& type = "t") {
  return {{s, type, {}}, r, {o, type, {}}};
}

}  // namespace

TEST_CASE("graph_stats hand-computed examples") {
  SUBCASE("triangle") {
    GraphStats s = graph_stats(cycle3());
    CHECK(s.n_nodes == 3);
    CHECK(s.n_edges == 3);
    CHECK(s.density == doctest::Approx(1.0));
    CHECK(s.avg_degree == doctest::Approx(2.0));
  }
  SUBCASE("single node") {
    auto g = ReasoningGraph::build(GraphKind::context_graph, {{"a", {"A", "t", {}}}}, {});
    GraphStats s = graph_stats(g);
    CHECK(s.density == 0.0);
    CHECK(s.avg_degree == 0.0);
  }
  SUBCASE("path on 4 nodes") {
    auto g = ReasoningGraph::build(GraphKind::context_graph,
                                   {{"a", {"A", "t", {}}},
                                    {"b", {"B", "t", {}}},
                                    {"c", {"C", "t", {}}},
                                    {"d", {"D", "t", {}}}},
                                   {{"a", "r", "b"}, {"b", "r", "c"}, {"c", "r", "d"}});
    GraphStats s = graph_stats(g);
    CHECK(s.density == doctest::Approx(0.5));
    CHECK(s.avg_degree == doctest::Approx(1.5));
  }
  SUBCASE("antiparallel edges project to one undirected pair") {
    auto g = ReasoningGraph::build(
        GraphKind::context_graph, {{"a", {"A", "t", {}}}, {"b", {"B", "t", {}}}},
        {{"a", "r", "b"}, {"b", "r", "a"}});
    GraphStats s = graph_stats(g);
    CHECK(s.n_edges == 1);
    CHECK(s.density == doctest::Approx(1.0));
  }
}

TEST_CASE("build_context_graph dedups entities and edges") {
  SUBCASE("chain") {
    auto g = build_context_graph({triplet("A", "r1", "B"), triplet("B", "r2", "C")});
    CHECK(g.nodes.size() == 3);
    CHECK(g.edges.size() == 2);
    CHECK(g.kind == GraphKind::context_graph);
  }
  SUBCASE("empty") {
    auto g = build_context_graph({});
    CHECK(g.nodes.empty());
    CHECK(g.edges.empty());
  }
  SUBCASE("duplicate triplet folds to one edge") {
    auto g = build_context_graph({triplet("A", "r", "B"), triplet("A", "r", "B")});
    CHECK(g.edges.size() == 1);
  }
  SUBCASE("same surface different type stays distinct") {
    auto g = build_context_graph(
        {{{"Mercury", "planet", {}}, "orbits", {"Sun", "star", {}}},
         {{"Mercury", "element", {}}, "melts at", {"Sun", "star", {}}}});
    CHECK(g.nodes.size() == 3);
  }
}

TEST_CASE("structurally_equivalent: reflexive with identity witness") {
  auto g = chain3();
  auto r = structurally_equivalent(g, g, EquivalenceMode::strict);
  CHECK(r.equivalent);
  REQUIRE(r.witness.has_value());
  for (const auto& [from, to] : *r.witness) CHECK(from == to);
}

TEST_CASE("structurally_equivalent: 3-path vs 3-cycle rejected fast") {
  auto r = structurally_equivalent(chain3(), cycle3(), EquivalenceMode::relaxed);
  CHECK_FALSE(r.equivalent);
  REQUIRE(r.failure_reason.has_value());
  CHECK(*r.failure_reason == EquivalenceFailure::edge_count);
  // confirmed by the brute-force oracle over all 3! bijections
  CHECK_FALSE(isomorphic_brute_force(chain3(), cycle3(), EquivalenceMode::relaxed));
}

TEST_CASE("structurally_equivalent: renamed copy stays equivalent in strict mode") {
  std::mt19937_64 rng(4242);
  for (int i = 0; i < 50; ++i) {
    auto g = random_graph(rng);
    auto renamed = relabeled_copy(g, rng);
    auto r = structurally_equivalent(g, renamed, EquivalenceMode::strict);
    CHECK(r.equivalent);
  }
}

TEST_CASE("structurally_equivalent: equal degree sequences, different structure") {
  // two directed triangles vs a directed 6-cycle: every node has (1,1)
  std::vector<GraphNode> nodes;
  for (int i = 0; i < 6; ++i) {
    nodes.push_back({"n" + std::to_string(i), {"E" + std::to_string(i), "t", {}}});
  }
  auto two_triangles = ReasoningGraph::build(
      GraphKind::context_graph, nodes,
      {{"n0", "r", "n1"}, {"n1", "r", "n2"}, {"n2", "r", "n0"},
       {"n3", "r", "n4"}, {"n4", "r", "n5"}, {"n5", "r", "n3"}});
  auto six_cycle = ReasoningGraph::build(
      GraphKind::context_graph, nodes,
      {{"n0", "r", "n1"}, {"n1", "r", "n2"}, {"n2", "r", "n3"},
       {"n3", "r", "n4"}, {"n4", "r", "n5"}, {"n5", "r", "n0"}});
  auto r = structurally_equivalent(two_triangles, six_cycle, EquivalenceMode::relaxed);
  CHECK_FALSE(r.equivalent);
  REQUIRE(r.failure_reason.has_value());
  CHECK(*r.failure_reason == EquivalenceFailure::no_isomorphism);
  CHECK_FALSE(isomorphic_brute_force(two_triangles, six_cycle, EquivalenceMode::relaxed));
}

TEST_CASE("strict mode distinguishes relation labels and node types") {
  auto a = ReasoningGraph::build(GraphKind::context_graph,
                                 {{"x", {"X", "t", {}}}, {"y", {"Y", "t", {}}}},
                                 {{"x", "founded", "y"}});
  auto b = ReasoningGraph::build(GraphKind::context_graph,
                                 {{"x", {"X", "t", {}}}, {"y", {"Y", "t", {}}}},
                                 {{"x", "dissolved", "y"}});
  auto r = structurally_equivalent(a, b, EquivalenceMode::strict);
  CHECK_FALSE(r.equivalent);
  CHECK(*r.failure_reason == EquivalenceFailure::relation_labels);
  CHECK(structurally_equivalent(a, b, EquivalenceMode::relaxed).equivalent);

  auto c = ReasoningGraph::build(GraphKind::context_graph,
                                 {{"x", {"X", "person", {}}}, {"y", {"Y", "t", {}}}},
                                 {{"x", "founded", "y"}});
  CHECK_FALSE(structurally_equivalent(a, c, EquivalenceMode::strict).equivalent);
}

TEST_CASE("kind mismatch is a precondition violation") {
  auto q = ReasoningGraph::build(GraphKind::question_graph, {{"a", {"A", "t", {}}}}, {});
  auto c = ReasoningGraph::build(GraphKind::context_graph, {{"a", {"A", "t", {}}}}, {});
  CHECK_THROWS_AS(structurally_equivalent(q, c, EquivalenceMode::strict), Error);
}

TEST_CASE("size limit raises when both graphs exceed the budget") {
  std::vector<GraphNode> nodes;
  for (int i = 0; i < 10; ++i) {
    nodes.push_back({"n" + std::to_string(i), {"E", "t", {}}});
  }
  auto g = ReasoningGraph::build(GraphKind::context_graph, nodes, {});
  try {
    structurally_equivalent(g, g, EquivalenceMode::strict, 8);
    FAIL("expected size_limit");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::size_limit);
  }
}

TEST_CASE("property: VF2 agrees with the brute-force oracle on small graphs") {
  std::mt19937_64 rng(777);
  int isomorphic_seen = 0, distinct_seen = 0;
  for (int i = 0; i < 150; ++i) {
    auto g1 = random_graph(rng);
    ReasoningGraph g2 = (i % 2 == 0) ? relabeled_copy(g1, rng) : perturbed_copy(g1, rng);
    for (EquivalenceMode mode : {EquivalenceMode::strict, EquivalenceMode::relaxed}) {
      bool expected = isomorphic_brute_force(g1, g2, mode);
      auto got = structurally_equivalent(g1, g2, mode);
      CHECK(got.equivalent == expected);
      (expected ? isomorphic_seen : distinct_seen) += 1;
    }
  }
  CHECK(isomorphic_seen > 0);
  CHECK(distinct_seen > 0);
}

TEST_CASE("property: equivalence is symmetric and transitive on samples") {
  std::mt19937_64 rng(31337);
  for (int i = 0; i < 40; ++i) {
    auto a = random_graph(rng);
    auto b = relabeled_copy(a, rng);
    auto c = relabeled_copy(b, rng);
    auto ab = structurally_equivalent(a, b, EquivalenceMode::strict).equivalent;
    auto ba = structurally_equivalent(b, a, EquivalenceMode::strict).equivalent;
    auto bc = structurally_equivalent(b, c, EquivalenceMode::strict).equivalent;
    auto ac = structurally_equivalent(a, c, EquivalenceMode::strict).equivalent;
    CHECK(ab == ba);
    CHECK(ab);
    CHECK(bc);
    CHECK(ac);  // transitivity along the relabeling chain
  }
}

TEST_CASE("cyclic_perturbation: identity cases") {
  std::vector<Triplet> chain{triplet("a", "r1", "b"), triplet("c", "r2", "d")};
  CHECK(cyclic_perturbation(chain, 0) == chain);
  CHECK(cyclic_perturbation(chain, 2) == chain);  // k ≡ 0 (mod n)
  std::vector<Triplet> one{triplet("a", "r", "b")};
  CHECK(cyclic_perturbation(one, 5) == one);
  CHECK(cyclic_perturbation({}, 3).empty());
}

TEST_CASE("cyclic_perturbation: hand-applied shift rule") {
  std::vector<Triplet> in{triplet("a", "r1", "b"), triplet("c", "r2", "d")};
  auto out = cyclic_perturbation(in, 1);
  REQUIRE(out.size() == 2);
  CHECK(out[0].subject.surface == "a");
  CHECK(out[0].relation == "r1");
  CHECK(out[0].object.surface == "d");
  CHECK(out[1].subject.surface == "c");
  CHECK(out[1].object.surface == "b");
}

TEST_CASE("cyclic_perturbation: self-pairing repair shifts one extra position") {
  // chain: shifting object_1=B onto subject B would self-pair
  std::vector<Triplet> in{triplet("A", "r1", "B"), triplet("B", "r2", "C")};
  std::vector<PerturbationNote> notes;
  auto out = cyclic_perturbation(in, 1, &notes);
  CHECK(out[0].object.surface == "C");
  CHECK(out[1].object.surface == "C");  // repaired: B would pair with itself
  REQUIRE(notes.size() == 1);
  CHECK(notes[0].triplet_index == 1);
}

TEST_CASE("property: entity multiset preserved when subjects and objects are disjoint") {
  std::mt19937_64 rng(2026);
  for (int round = 0; round < 100; ++round) {
    int n = 2 + static_cast<int>(rng() % 6);
    std::vector<Triplet> in;
    for (int i = 0; i < n; ++i) {
      in.push_back(triplet("S" + std::to_string(i), "r" + std::to_string(i),
                           "O" + std::to_string(rng() % n)));
    }
    int k = static_cast<int>(rng() % 10);
    auto out = cyclic_perturbation(in, k);
    REQUIRE(out.size() == in.size());
    auto multiset_of = [](const std::vector<Triplet>& ts) {
      std::vector<std::string> m;
      for (const auto& t : ts) {
        m.push_back(t.subject.surface);
        m.push_back(t.object.surface);
      }
      std::sort(m.begin(), m.end());
      return m;
    };
    CHECK(multiset_of(out) == multiset_of(in));
    for (std::size_t i = 0; i < in.size(); ++i) {
      CHECK(out[i].subject == in[i].subject);
      CHECK(out[i].relation == in[i].relation);
    }
  }
}

TEST_CASE("perturbation changes the 3-node chain's structure (relaxed)") {
  std::vector<Triplet> chain{triplet("A", "r1", "B"), triplet("B", "r2", "C")};
  auto perturbed = cyclic_perturbation(chain, 1);
  auto g1 = build_context_graph(chain);
  auto g2 = build_context_graph(perturbed);
  auto r = structurally_equivalent(g1, g2, EquivalenceMode::relaxed);
  CHECK_FALSE(r.equivalent);
}
