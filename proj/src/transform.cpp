#include "seedforge/transform.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_map>

#include "seedforge/json_io.hpp"
#include "seedforge/log.hpp"
#include "seedforge/text.hpp"

namespace seedforge {

namespace {

using nlohmann::json;

std::string join_lines(const std::vector<std::string>& items) {
  if (items.empty()) return "(none)";
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += "; ";
    out += s;
  }
  return out;
}

bool contains_surface_ci(const std::string& haystack, const std::string& surface) {
  if (surface.empty()) return false;
  std::size_t m = surface.size();
  if (m > haystack.size()) return false;
  for (std::size_t i = 0; i + m <= haystack.size(); ++i) {
    if (text::iequals_ascii(std::string_view(haystack).substr(i, m), surface)) return true;
  }
  return false;
}

}  // namespace

ReplacementProposal propose_replacement(const Entity& entity,
                                        const std::vector<std::string>& exclusions,
                                        Gateway& gateway, const TemplateStore& templates,
                                        const ProposalOptions& options) {
  if (text::trim(entity.surface).empty()) {
    raise(ErrorCode::invalid_argument, "cannot replace an empty entity surface");
  }
  std::set<std::string> excluded_keys;
  for (const auto& e : exclusions) excluded_keys.insert(text::entity_key(e));

  std::string last_reason;
  for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
    std::string prompt = templates.render(
        "replacement_proposal",
        {{"surface", entity.surface},
         {"semantic_type", entity.semantic_type},
         {"exclusions", join_lines(exclusions)},
         {"nonce", options.nonce + (attempt > 0 ? "/retry" + std::to_string(attempt) : "")}});
    ChatRequest req;
    req.user_prompt = prompt;
    req.temperature = options.temperature;
    req.max_output_tokens = options.max_output_tokens;
    req.seed = options.seed ? std::optional<std::int64_t>(*options.seed + attempt)
                            : std::nullopt;
    std::string response = gateway.complete(req);
    std::string candidate, rationale;
    try {
      json payload = parse_json_payload(response);
      candidate = text::trim(payload.value("replacement", std::string()));
      rationale = payload.value("rationale", std::string());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::parse) throw;
      last_reason = e.what();
      continue;
    } catch (const nlohmann::json::exception& e) {
      last_reason = e.what();
      continue;
    }
    if (candidate.empty()) {
      last_reason = "empty replacement surface";
      continue;
    }
    std::string key = text::entity_key(candidate);
    if (key == text::entity_key(entity.surface)) {
      last_reason = "proposal equals the seed surface";
      continue;
    }
    if (excluded_keys.count(key)) {
      last_reason = "proposal '" + candidate + "' is excluded";
      continue;
    }
    ReplacementProposal p;
    p.seed_entity = entity;
    p.candidate = Entity{candidate, entity.semantic_type, {}};
    p.rationale = rationale;
    return p;
  }
  raise(ErrorCode::proposal_exhausted,
        "no valid replacement for '" + entity.surface + "': " + last_reason);
}

EntityMapping build_mapping_for_entities(const std::vector<Entity>& entities,
                                         const std::vector<std::string>& exclusions,
                                         Gateway& gateway, const TemplateStore& templates,
                                         const ProposalOptions& options) {
  if (entities.empty()) {
    raise(ErrorCode::invalid_argument, "build_mapping: no entities");
  }
  // distinct by (normalized surface, type)
  std::vector<Entity> distinct;
  std::set<std::string> seen;
  for (const auto& e : entities) {
    std::string key = text::entity_key(e.surface) + "\x1f" + e.semantic_type;
    if (seen.insert(key).second) distinct.push_back(e);
  }

  std::vector<std::string> working_exclusions = exclusions;
  // replacements must also avoid every seed surface
  for (const auto& e : distinct) working_exclusions.push_back(e.surface);

  std::vector<MappingPair> pairs;
  int index = 0;
  for (const auto& entity : distinct) {
    ProposalOptions per_call = options;
    per_call.nonce = options.nonce + "#" + std::to_string(index++);
    if (options.seed) per_call.seed = *options.seed + 131 * index;
    ReplacementProposal p =
        propose_replacement(entity, working_exclusions, gateway, templates, per_call);
    working_exclusions.push_back(p.candidate.surface);  // injectivity
    pairs.push_back({p.seed_entity, p.candidate});
  }
  return EntityMapping::create(std::move(pairs), exclusions);
}

EntityMapping build_mapping(const ReasoningGraph& graph,
                            const std::vector<std::string>& exclusions, Gateway& gateway,
                            const TemplateStore& templates, const ProposalOptions& options) {
  if (graph.nodes.empty()) {
    raise(ErrorCode::invalid_argument, "build_mapping: graph has no nodes");
  }
  std::vector<Entity> entities;
  entities.reserve(graph.nodes.size());
  for (const auto& n : graph.nodes) entities.push_back(n.entity);
  return build_mapping_for_entities(entities, exclusions, gateway, templates, options);
}

std::string apply_mapping_to_text(std::string_view input, const EntityMapping& mapping) {
  auto occurrences =
      find_occurrences(input, mapping, TextRole::question, 0);  // role irrelevant here
  std::string out;
  out.reserve(input.size());
  std::size_t cursor = 0;
  for (const auto& occ : occurrences) {
    out.append(input.substr(cursor, occ.begin - cursor));
    const MappingPair& pair = mapping.pairs()[occ.pair_index];
    std::string_view span = input.substr(occ.begin, occ.end - occ.begin);
    // possessive spans keep their suffix: replace only the base form
    std::string_view base = span;
    std::string suffix;
    if (occ.via_alias) {
      if (span.size() >= 2 && (span.ends_with("'s") || span.ends_with("’s"))) {
        std::size_t cut = span.ends_with("'s") ? 2 : 4;  // UTF-8 apostrophe is 3 bytes
        if (text::iequals_ascii(span.substr(0, span.size() - cut), pair.seed.surface)) {
          base = span.substr(0, span.size() - cut);
          suffix = std::string(span.substr(span.size() - cut));
        }
      }
    }
    out += text::apply_case_pattern(text::classify_case(base), pair.replacement.surface);
    out += suffix;
    cursor = occ.end;
  }
  out.append(input.substr(cursor));
  return out;
}

Sample apply_mapping(const Sample& sample, const EntityMapping& mapping) {
  Sample out = sample;
  out.question = apply_mapping_to_text(sample.question, mapping);
  out.answer = apply_mapping_to_text(sample.answer, mapping);
  for (auto& doc : out.contexts) {
    doc.title = apply_mapping_to_text(doc.title, mapping);
    doc.body = apply_mapping_to_text(doc.body, mapping);
  }
  if (out.choices) {
    for (auto& choice : *out.choices) choice = apply_mapping_to_text(choice, mapping);
  }
  return out;
}

std::vector<Triplet> map_triplets(const std::vector<Triplet>& triplets,
                                  const EntityMapping& mapping) {
  auto map_entity = [&mapping](const Entity& e) {
    if (const MappingPair* p = mapping.find_by_seed_surface(e.surface)) {
      return p->replacement;
    }
    return e;
  };
  std::vector<Triplet> out;
  out.reserve(triplets.size());
  for (const auto& t : triplets) {
    out.push_back({map_entity(t.subject), t.relation, map_entity(t.object)});
  }
  return out;
}

std::vector<Document> regenerate_context(const std::vector<Triplet>& triplets,
                                         const EntityMapping& mapping, Gateway& gateway,
                                         const TemplateStore& templates,
                                         const RegenerationOptions& options) {
  if (triplets.empty()) {
    raise(ErrorCode::invalid_argument, "regenerate_context: no triplets");
  }
  std::vector<Triplet> mapped = map_triplets(triplets, mapping);

  std::set<std::string> required;
  for (const auto& t : mapped) {
    required.insert(t.subject.surface);
    required.insert(t.object.surface);
  }
  std::vector<std::string> forbidden;
  for (const auto& p : mapping.pairs()) forbidden.push_back(p.seed.surface);

  std::string base_prompt = templates.render(
      "context_regeneration",
      {{"style_hint", options.style_hint},
       {"triplets_json", triplets_to_json(mapped).dump(2)},
       {"forbidden", join_lines(forbidden)}});

  std::string last_reason;
  for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
    ChatRequest req;
    req.user_prompt =
        base_prompt + (attempt > 0
                           ? "\n\n(Attempt " + std::to_string(attempt + 1) +
                                 ": the previous passage was rejected: " + last_reason +
                                 ". Every listed surface must appear verbatim.)"
                           : "");
    req.temperature = options.temperature;
    req.max_output_tokens = options.max_output_tokens;
    req.seed = options.seed ? std::optional<std::int64_t>(*options.seed + attempt)
                            : std::nullopt;
    std::string passage = gateway.complete(req);

    bool ok = true;
    for (const auto& surface : required) {
      if (!contains_surface_ci(passage, surface)) {
        last_reason = "missing mapped surface '" + surface + "'";
        ok = false;
        break;
      }
    }
    if (ok) {
      for (const auto& surface : forbidden) {
        if (contains_surface_ci(passage, surface)) {
          last_reason = "seed surface '" + surface + "' still present";
          ok = false;
          break;
        }
      }
    }
    if (!ok) continue;

    // one document per paragraph
    std::vector<Document> docs;
    std::string paragraph;
    std::istringstream lines(passage);
    std::string line;
    auto flush = [&docs, &paragraph] {
      std::string body = text::trim(paragraph);
      if (!body.empty()) {
        Document d;
        d.doc_id = "r" + std::to_string(docs.size());
        d.title = "Passage " + std::to_string(docs.size() + 1);
        d.body = body;
        docs.push_back(std::move(d));
      }
      paragraph.clear();
    };
    while (std::getline(lines, line)) {
      if (text::trim(line).empty()) {
        flush();
      } else {
        if (!paragraph.empty()) paragraph += " ";
        paragraph += text::trim(line);
      }
    }
    flush();
    if (docs.empty()) {
      last_reason = "empty passage";
      continue;
    }
    return docs;
  }
  raise(ErrorCode::regeneration_incomplete, "context regeneration failed: " + last_reason);
}

}  // namespace seedforge
