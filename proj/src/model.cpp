#include "seedforge/model.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "seedforge/errors.hpp"
#include "seedforge/text.hpp"

namespace seedforge {

namespace {

// answer/choice comparison uses the verifier's normalization rules
std::string norm(const std::string& s) { return text::normalize_for_match(s); }

}  // namespace

std::vector<Document> Sample::gold_documents() const {
  if (!supporting_ids || supporting_ids->empty()) return contexts;
  std::vector<Document> out;
  for (const auto& id : *supporting_ids) {
    for (const auto& doc : contexts) {
      if (doc.doc_id == id) {
        out.push_back(doc);
        break;
      }
    }
  }
  return out;
}

const char* graph_kind_name(GraphKind kind) {
  return kind == GraphKind::question_graph ? "question_graph" : "context_graph";
}

GraphKind graph_kind_from_name(const std::string& name) {
  if (name == "question_graph") return GraphKind::question_graph;
  if (name == "context_graph") return GraphKind::context_graph;
  raise(ErrorCode::parse, "unknown graph kind: " + name);
}

const char* context_path_name(ContextPath path) {
  return path == ContextPath::surface_substitution ? "surface_substitution"
                                                   : "triplet_regeneration";
}

ContextPath context_path_from_name(const std::string& name) {
  if (name == "surface_substitution") return ContextPath::surface_substitution;
  if (name == "triplet_regeneration") return ContextPath::triplet_regeneration;
  raise(ErrorCode::parse, "unknown context path: " + name);
}

const char* condition_kind_name(ConditionKind kind) {
  switch (kind) {
    case ConditionKind::no_context: return "no_context";
    case ConditionKind::gold: return "gold";
    case ConditionKind::retriever: return "retriever";
  }
  return "?";
}

ConditionKind condition_kind_from_name(const std::string& name) {
  if (name == "no_context") return ConditionKind::no_context;
  if (name == "gold") return ConditionKind::gold;
  if (name == "retriever") return ConditionKind::retriever;
  raise(ErrorCode::parse, "unknown condition kind: " + name);
}

const char* quality_class_name(QualityClassKind kind) {
  switch (kind) {
    case QualityClassKind::leak: return "leak";
    case QualityClassKind::factual_inconsistency: return "factual_inconsistency";
    case QualityClassKind::non_leaking: return "non_leaking";
  }
  return "?";
}

QualityClassKind quality_class_from_name(const std::string& name) {
  if (name == "leak") return QualityClassKind::leak;
  if (name == "factual_inconsistency") return QualityClassKind::factual_inconsistency;
  if (name == "non_leaking") return QualityClassKind::non_leaking;
  raise(ErrorCode::parse, "unknown quality class: " + name);
}

const char* text_role_name(TextRole role) {
  switch (role) {
    case TextRole::question: return "question";
    case TextRole::answer: return "answer";
    case TextRole::document_title: return "document_title";
    case TextRole::document_body: return "document_body";
    case TextRole::choice: return "choice";
  }
  return "?";
}

ReasoningGraph ReasoningGraph::build(GraphKind kind, std::vector<GraphNode> nodes,
                                     std::vector<GraphEdge> edges) {
  ReasoningGraph g;
  g.kind = kind;
  g.nodes = std::move(nodes);

  std::unordered_set<std::string> ids;
  for (const auto& n : g.nodes) {
    if (!ids.insert(n.id).second) {
      raise(ErrorCode::invalid_argument, "duplicate node id: " + n.id);
    }
  }
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  for (auto& e : edges) {
    if (e.src == e.dst) continue;  // degenerate extraction, normalized away
    if (!ids.count(e.src) || !ids.count(e.dst)) {
      raise(ErrorCode::invalid_argument,
            "edge endpoint not in node set: " + e.src + " -> " + e.dst);
    }
    if (seen.insert({e.src, e.relation, e.dst}).second) {
      g.edges.push_back(std::move(e));
    }
  }
  return g;
}

const GraphNode* ReasoningGraph::find_node(const std::string& id) const {
  for (const auto& n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

bool ReasoningGraph::weakly_connected() const {
  if (nodes.size() <= 1) return true;
  std::unordered_map<std::string, std::vector<std::string>> adj;
  for (const auto& e : edges) {
    adj[e.src].push_back(e.dst);
    adj[e.dst].push_back(e.src);
  }
  std::unordered_set<std::string> visited;
  std::vector<std::string> stack{nodes.front().id};
  while (!stack.empty()) {
    std::string cur = stack.back();
    stack.pop_back();
    if (!visited.insert(cur).second) continue;
    for (const auto& nxt : adj[cur]) {
      if (!visited.count(nxt)) stack.push_back(nxt);
    }
  }
  return visited.size() == nodes.size();
}

std::vector<Violation> validate_graph(const ReasoningGraph& graph) {
  std::vector<Violation> out;
  std::unordered_set<std::string> ids;
  for (const auto& n : graph.nodes) {
    if (!ids.insert(n.id).second) out.push_back({"nodes", "duplicate node id " + n.id});
    if (text::trim(n.entity.surface).empty()) {
      out.push_back({"nodes", "entity surface empty for node " + n.id});
    }
  }
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  for (const auto& e : graph.edges) {
    if (!ids.count(e.src)) out.push_back({"edges", "unknown src " + e.src});
    if (!ids.count(e.dst)) out.push_back({"edges", "unknown dst " + e.dst});
    if (e.src == e.dst) out.push_back({"edges", "self-loop on " + e.src});
    if (!seen.insert({e.src, e.relation, e.dst}).second) {
      out.push_back({"edges", "duplicate edge " + e.src + " -" + e.relation + "-> " + e.dst});
    }
  }
  return out;
}

EntityMapping EntityMapping::create(std::vector<MappingPair> pairs,
                                    std::vector<std::string> exclusions) {
  std::unordered_set<std::string> replacement_keys;
  std::unordered_set<std::string> seed_keys;
  std::unordered_set<std::string> exclusion_keys;
  for (const auto& ex : exclusions) exclusion_keys.insert(text::entity_key(ex));
  for (const auto& p : pairs) seed_keys.insert(text::entity_key(p.seed.surface));

  for (const auto& p : pairs) {
    if (text::trim(p.seed.surface).empty() || text::trim(p.replacement.surface).empty()) {
      raise(ErrorCode::invalid_argument, "mapping pair with empty surface");
    }
    if (p.seed.semantic_type != p.replacement.semantic_type) {
      raise(ErrorCode::invalid_argument,
            "type mismatch: '" + p.seed.surface + "' (" + p.seed.semantic_type +
                ") -> '" + p.replacement.surface + "' (" + p.replacement.semantic_type + ")");
    }
    std::string rkey = text::entity_key(p.replacement.surface);
    if (!replacement_keys.insert(rkey).second) {
      raise(ErrorCode::invalid_argument,
            "mapping not injective: replacement '" + p.replacement.surface + "' reused");
    }
    if (seed_keys.count(rkey)) {
      raise(ErrorCode::invalid_argument,
            "replacement '" + p.replacement.surface + "' collides with a seed surface");
    }
    if (exclusion_keys.count(rkey)) {
      raise(ErrorCode::invalid_argument,
            "replacement '" + p.replacement.surface + "' is excluded");
    }
  }
  EntityMapping m;
  m.pairs_ = std::move(pairs);
  m.exclusions_ = std::move(exclusions);
  return m;
}

EntityMapping EntityMapping::inverse() const {
  std::vector<MappingPair> swapped;
  swapped.reserve(pairs_.size());
  for (const auto& p : pairs_) swapped.push_back({p.replacement, p.seed});
  return create(std::move(swapped), {});
}

const MappingPair* EntityMapping::find_by_seed_surface(const std::string& surface) const {
  std::string key = text::entity_key(surface);
  for (const auto& p : pairs_) {
    if (text::entity_key(p.seed.surface) == key) return &p;
  }
  return nullptr;
}

BenchmarkMetrics make_metrics(std::string dataset_id, std::string model_id,
                              double acc_no_ctx, double acc_gold, int n_questions) {
  if (acc_no_ctx < 0.0 || acc_no_ctx > 1.0 || acc_gold < 0.0 || acc_gold > 1.0) {
    raise(ErrorCode::invalid_argument, "accuracies must lie in [0,1]");
  }
  if (n_questions <= 0) {
    raise(ErrorCode::invalid_argument, "n_questions must be positive");
  }
  BenchmarkMetrics m;
  m.dataset_id = std::move(dataset_id);
  m.model_id = std::move(model_id);
  m.acc_no_ctx = acc_no_ctx;
  m.acc_gold = acc_gold;
  m.leakage_error = acc_no_ctx;
  m.answerability_accuracy = acc_gold - acc_no_ctx;
  m.n_questions = n_questions;
  return m;
}

std::vector<Violation> validate_sample(const Sample& sample) {
  std::vector<Violation> out;
  if (text::trim(sample.question).empty()) out.push_back({"question", "empty"});
  if (text::trim(sample.answer).empty()) out.push_back({"answer", "empty"});

  std::unordered_set<std::string> doc_ids;
  for (const auto& doc : sample.contexts) {
    if (!doc_ids.insert(doc.doc_id).second) {
      out.push_back({"contexts", "duplicate doc_id " + doc.doc_id});
    }
  }
  if (sample.supporting_ids) {
    for (const auto& id : *sample.supporting_ids) {
      if (!doc_ids.count(id)) {
        out.push_back({"supporting_ids", "dangling supporting_id " + id});
      }
    }
  }
  if (sample.choices) {
    std::string answer_n = norm(sample.answer);
    int matches = 0;
    for (const auto& choice : *sample.choices) {
      if (norm(choice) == answer_n) ++matches;
    }
    if (matches != 1) {
      out.push_back({"choices", "answer matches " + std::to_string(matches) +
                                    " choices, expected exactly 1"});
    }
  }
  return out;
}

namespace {

struct Candidate {
  std::size_t begin;
  std::size_t len;
  std::size_t pair_index;
  bool via_alias;
};

bool boundary_ok(std::string_view t, std::size_t begin, std::size_t end) {
  if (begin > 0 && text::is_word_byte(static_cast<unsigned char>(t[begin - 1]))) return false;
  if (end < t.size() && text::is_word_byte(static_cast<unsigned char>(t[end]))) return false;
  return true;
}

void collect_matches(std::string_view text_view, std::string_view pattern,
                     std::size_t pair_index, bool via_alias,
                     std::vector<Candidate>& out) {
  if (pattern.empty()) return;
  std::size_t n = text_view.size(), m = pattern.size();
  if (m > n) return;
  for (std::size_t i = 0; i + m <= n; ++i) {
    if (!text::iequals_ascii(text_view.substr(i, m), pattern)) continue;
    if (!boundary_ok(text_view, i, i + m)) continue;
    out.push_back({i, m, pair_index, via_alias});
  }
}

}  // namespace

std::vector<Occurrence> find_occurrences(std::string_view text_view,
                                         const EntityMapping& mapping,
                                         TextRole role, int role_index) {
  std::vector<Candidate> candidates;
  const auto& pairs = mapping.pairs();
  for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
    const Entity& seed = pairs[pi].seed;
    collect_matches(text_view, seed.surface, pi, false, candidates);
    // automatic possessive aliases
    collect_matches(text_view, seed.surface + "'s", pi, true, candidates);
    collect_matches(text_view, seed.surface + "’s", pi, true, candidates);
    for (const auto& alias : seed.aliases) {
      collect_matches(text_view, alias, pi, true, candidates);
    }
  }
  // longest-match-first, then leftmost-first
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) {
                     if (a.len != b.len) return a.len > b.len;
                     return a.begin < b.begin;
                   });
  std::vector<Occurrence> accepted;
  std::vector<std::pair<std::size_t, std::size_t>> taken;
  for (const auto& c : candidates) {
    bool overlaps = false;
    for (const auto& [b, e] : taken) {
      if (c.begin < e && b < c.begin + c.len) {
        overlaps = true;
        break;
      }
    }
    if (overlaps) continue;
    taken.emplace_back(c.begin, c.begin + c.len);
    Occurrence occ;
    occ.role = role;
    occ.role_index = role_index;
    occ.begin = c.begin;
    occ.end = c.begin + c.len;
    occ.pair_index = c.pair_index;
    occ.via_alias = c.via_alias;
    accepted.push_back(occ);
  }
  std::sort(accepted.begin(), accepted.end(),
            [](const Occurrence& a, const Occurrence& b) { return a.begin < b.begin; });
  return accepted;
}

std::vector<Occurrence> compose_occurrences(const Sample& sample,
                                            const EntityMapping& mapping) {
  std::vector<Occurrence> out;
  auto add = [&out](std::vector<Occurrence> v) {
    out.insert(out.end(), v.begin(), v.end());
  };
  add(find_occurrences(sample.question, mapping, TextRole::question, 0));
  add(find_occurrences(sample.answer, mapping, TextRole::answer, 0));
  for (std::size_t i = 0; i < sample.contexts.size(); ++i) {
    add(find_occurrences(sample.contexts[i].title, mapping, TextRole::document_title,
                         static_cast<int>(i)));
    add(find_occurrences(sample.contexts[i].body, mapping, TextRole::document_body,
                         static_cast<int>(i)));
  }
  if (sample.choices) {
    for (std::size_t i = 0; i < sample.choices->size(); ++i) {
      add(find_occurrences((*sample.choices)[i], mapping, TextRole::choice,
                           static_cast<int>(i)));
    }
  }
  return out;
}

}  // namespace seedforge
