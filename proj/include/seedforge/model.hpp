#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace seedforge {

struct Document {
  std::string doc_id;
  std::string title;
  std::string body;

  bool operator==(const Document&) const = default;
};

struct Sample {
  std::string id;
  std::string question;
  std::string answer;
  std::vector<Document> contexts;
  std::optional<std::vector<std::string>> supporting_ids;
  std::string source_dataset = "custom";
  std::optional<std::vector<std::string>> choices;
  // Unknown input fields, preserved verbatim on round-trip.
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const Sample&) const = default;

  // Supporting documents when supporting_ids is set, else all contexts.
  std::vector<Document> gold_documents() const;
};

struct Entity {
  std::string surface;
  std::string semantic_type;
  std::vector<std::string> aliases;

  bool operator==(const Entity&) const = default;
};

struct Triplet {
  Entity subject;
  std::string relation;
  Entity object;

  bool operator==(const Triplet&) const = default;
};

enum class GraphKind { question_graph, context_graph };

const char* graph_kind_name(GraphKind kind);
GraphKind graph_kind_from_name(const std::string& name);

struct GraphNode {
  std::string id;
  Entity entity;

  bool operator==(const GraphNode&) const = default;
};

struct GraphEdge {
  std::string src;
  std::string relation;
  std::string dst;

  bool operator==(const GraphEdge&) const = default;
};

struct ReasoningGraph {
  GraphKind kind = GraphKind::question_graph;
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;

  bool operator==(const ReasoningGraph&) const = default;

  // Normalizing constructor: drops self-loops and exact duplicate edges,
  // then enforces the remaining invariants (unique node ids, endpoints
  // resolve). Throws Error(invalid_argument) on violation.
  static ReasoningGraph build(GraphKind kind, std::vector<GraphNode> nodes,
                              std::vector<GraphEdge> edges);

  const GraphNode* find_node(const std::string& id) const;
  bool weakly_connected() const;
};

struct MappingPair {
  Entity seed;
  Entity replacement;

  bool operator==(const MappingPair&) const = default;
};

// Bijective, type-preserving entity mapping. Invariants are enforced at
// construction; instances are immutable afterwards.
class EntityMapping {
 public:
  EntityMapping() = default;

  // Throws Error(invalid_argument) naming the violated rule.
  static EntityMapping create(std::vector<MappingPair> pairs,
                              std::vector<std::string> exclusions);

  const std::vector<MappingPair>& pairs() const { return pairs_; }
  const std::vector<std::string>& exclusions() const { return exclusions_; }

  // Swapped pairs, empty exclusions. Valid because the forward mapping is
  // injective and type-preserving.
  EntityMapping inverse() const;

  const MappingPair* find_by_seed_surface(const std::string& surface) const;

  bool operator==(const EntityMapping&) const = default;

 private:
  std::vector<MappingPair> pairs_;
  std::vector<std::string> exclusions_;
};

enum class ContextPath { surface_substitution, triplet_regeneration };

const char* context_path_name(ContextPath path);
ContextPath context_path_from_name(const std::string& name);

struct Provenance {
  int attempts = 1;
  std::string generator_backend;
  std::string verifier_backend;
  std::string timestamp;

  bool operator==(const Provenance&) const = default;
};

struct GeneratedSample {
  std::string seed_id;
  Sample sample;
  EntityMapping mapping;
  ContextPath context_path = ContextPath::surface_substitution;
  ReasoningGraph question_graph;
  ReasoningGraph context_graph;
  Provenance provenance;
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const GeneratedSample&) const = default;
};

enum class ConditionKind { no_context, gold, retriever };

const char* condition_kind_name(ConditionKind kind);
ConditionKind condition_kind_from_name(const std::string& name);

enum class QualityClassKind { leak, factual_inconsistency, non_leaking };

const char* quality_class_name(QualityClassKind kind);
QualityClassKind quality_class_from_name(const std::string& name);

struct EvalRecord {
  std::string sample_id;
  ConditionKind condition = ConditionKind::no_context;
  std::string retriever_name;  // set iff condition == retriever
  std::string model_response;
  bool correct = false;
  bool errored = false;
  std::string error_reason;
  std::optional<QualityClassKind> quality_class;  // no_context records only

  bool operator==(const EvalRecord&) const = default;
};

struct BenchmarkMetrics {
  std::string dataset_id;
  std::string model_id;
  double acc_no_ctx = 0.0;
  double acc_gold = 0.0;
  double leakage_error = 0.0;
  double answerability_accuracy = 0.0;
  int n_questions = 0;

  bool operator==(const BenchmarkMetrics&) const = default;
};

// Derived fields computed from the accuracies; the definitional identities
// hold by construction.
BenchmarkMetrics make_metrics(std::string dataset_id, std::string model_id,
                              double acc_no_ctx, double acc_gold,
                              int n_questions);

struct Violation {
  std::string field;
  std::string rule;

  bool operator==(const Violation&) const = default;
};

// Empty iff all Sample invariants hold. Violations are data, not failures.
std::vector<Violation> validate_sample(const Sample& sample);

std::vector<Violation> validate_graph(const ReasoningGraph& graph);

enum class TextRole { question, answer, document_title, document_body, choice };

const char* text_role_name(TextRole role);

// One located seed-entity occurrence inside a role text. Byte offsets;
// [begin, end) spans the matched surface or alias.
struct Occurrence {
  TextRole role = TextRole::question;
  int role_index = 0;  // document index or choice index; 0 otherwise
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t pair_index = 0;  // index into mapping.pairs()
  bool via_alias = false;
};

// Locates every occurrence of every seed surface/alias in one text.
// Overlaps resolved longest-match-first, then leftmost-first. Matching is
// ASCII-case-insensitive and word-boundary anchored; possessive forms
// ("X's", "X’s") are matched as automatic aliases.
std::vector<Occurrence> find_occurrences(std::string_view text,
                                         const EntityMapping& mapping,
                                         TextRole role, int role_index);

// Role-tagged occurrence index over question, answer, contexts and choices.
std::vector<Occurrence> compose_occurrences(const Sample& sample,
                                            const EntityMapping& mapping);

}  // namespace seedforge
