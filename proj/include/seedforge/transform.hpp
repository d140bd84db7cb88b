#pragma once

#include <string>
#include <vector>

#include "seedforge/extraction.hpp"
#include "seedforge/gateway.hpp"
#include "seedforge/model.hpp"
#include "seedforge/templates.hpp"

namespace seedforge {

struct ReplacementProposal {
  Entity seed_entity;
  Entity candidate;
  std::string rationale;
};

struct ProposalOptions {
  double temperature = 0.8;
  int max_output_tokens = 256;
  // Invariant-violating proposals re-prompt this many times before
  // Error(proposal_exhausted).
  int max_retries = 3;
  // Mixed into the prompt so distinct runs draw distinct candidates.
  std::string nonce;
  std::optional<std::int64_t> seed;
};

// Same-semantic-type candidate whose surface differs from the seed and from
// every exclusion (case-insensitive).
ReplacementProposal propose_replacement(const Entity& entity,
                                        const std::vector<std::string>& exclusions,
                                        Gateway& gateway,
                                        const TemplateStore& templates,
                                        const ProposalOptions& options = {});

// One pair per distinct entity node; injectivity enforced by feeding
// already-chosen replacement surfaces into each call's exclusion set.
EntityMapping build_mapping(const ReasoningGraph& graph,
                            const std::vector<std::string>& exclusions,
                            Gateway& gateway, const TemplateStore& templates,
                            const ProposalOptions& options = {});

// Superset used by the pipeline: the entity list may span several graphs
// plus the answer entity.
EntityMapping build_mapping_for_entities(const std::vector<Entity>& entities,
                                         const std::vector<std::string>& exclusions,
                                         Gateway& gateway,
                                         const TemplateStore& templates,
                                         const ProposalOptions& options = {});

// Simultaneous longest-match substitution over question, answer, contexts
// and choices. Case pattern of each matched span is preserved; bytes
// outside replaced spans are untouched; replacement output is never
// rescanned.
Sample apply_mapping(const Sample& sample, const EntityMapping& mapping);

std::string apply_mapping_to_text(std::string_view text,
                                  const EntityMapping& mapping);

// Entities of each triplet pushed through the mapping (unmapped entities
// pass through unchanged).
std::vector<Triplet> map_triplets(const std::vector<Triplet>& triplets,
                                  const EntityMapping& mapping);

struct RegenerationOptions {
  std::string style_hint = "encyclopedic paragraph, one paragraph per connected component";
  double temperature = 0.8;
  int max_output_tokens = 2048;
  // Missing mapped surface or lingering seed surface re-prompts this many
  // times before Error(regeneration_incomplete).
  int max_retries = 2;
  std::optional<std::int64_t> seed;
};

// Applies the mapping to the triplets, then asks the backend for a fresh
// passage. The accepted passage contains every mapped subject/object
// surface and no seed surface; paragraphs become separate documents.
std::vector<Document> regenerate_context(const std::vector<Triplet>& triplets,
                                         const EntityMapping& mapping,
                                         Gateway& gateway,
                                         const TemplateStore& templates,
                                         const RegenerationOptions& options = {});

}  // namespace seedforge
