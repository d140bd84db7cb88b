#pragma once

#include <string>
#include <vector>

#include "seedforge/gateway.hpp"
#include "seedforge/model.hpp"
#include "seedforge/templates.hpp"

namespace seedforge {

struct ExtractionOptions {
  double temperature = 0.0;
  int max_output_tokens = 2048;
  // Parse failures re-prompt this many times before Error(extraction_parse).
  int max_parse_retries = 2;
  std::optional<std::int64_t> seed;
};

// Question graph capturing the reasoning chain of (question, answer) in
// light of the context. Entities carry semantic types from the extraction
// prompt. Disconnected output triggers one re-prompt, then
// Error(extraction_parse, "...disconnected...").
ReasoningGraph extract_question_graph(const Sample& sample, Gateway& gateway,
                                      const TemplateStore& templates,
                                      const ExtractionOptions& options = {});

// Factual (subject, relation, object) triplets from the context documents,
// deduplicated; triplets whose subject/object surface (or a listed alias)
// does not appear in the source text are dropped with a warning.
std::vector<Triplet> extract_triplets(const std::vector<Document>& contexts,
                                      Gateway& gateway,
                                      const TemplateStore& templates,
                                      const ExtractionOptions& options = {});

// Exposed for the parser unit tests: pulls the first JSON object out of a
// possibly fenced/prose-wrapped backend reply.
nlohmann::json parse_json_payload(const std::string& response);

}  // namespace seedforge
