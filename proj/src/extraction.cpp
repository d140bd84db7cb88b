#include "seedforge/extraction.hpp"

#include <set>
#include <sstream>

#include "seedforge/json_io.hpp"
#include "seedforge/log.hpp"
#include "seedforge/text.hpp"

namespace seedforge {

namespace {

using nlohmann::json;

std::string render_context(const std::vector<Document>& docs) {
  std::ostringstream out;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (i > 0) out << "\n\n";
    if (!docs[i].title.empty()) out << "[" << docs[i].title << "]\n";
    out << docs[i].body;
  }
  return out.str();
}

std::string retry_suffix(int attempt) {
  if (attempt == 0) return "";
  return "\n\n(Attempt " + std::to_string(attempt + 1) +
         ": the previous reply was not a valid payload. Reply with exactly one JSON "
         "object in the requested schema and nothing else.)";
}

bool surface_in_text(const std::string& surface, const std::vector<std::string>& aliases,
                     const std::string& haystack) {
  if (!surface.empty() && haystack.find(surface) != std::string::npos) return true;
  for (const auto& a : aliases) {
    if (!a.empty() && haystack.find(a) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

json parse_json_payload(const std::string& response) {
  // accept fenced blocks and surrounding prose: scan for the first '{' that
  // opens a parseable object
  for (std::size_t start = response.find('{'); start != std::string::npos;
       start = response.find('{', start + 1)) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < response.size(); ++i) {
      char c = response[i];
      if (in_string) {
        if (escaped) {
          escaped = false;
        } else if (c == '\\') {
          escaped = true;
        } else if (c == '"') {
          in_string = false;
        }
        continue;
      }
      if (c == '"') {
        in_string = true;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}') {
        --depth;
        if (depth == 0) {
          json j = json::parse(response.substr(start, i - start + 1), nullptr, false);
          if (!j.is_discarded()) return j;
          break;
        }
      }
    }
  }
  raise(ErrorCode::parse, "no JSON object found in backend reply");
}

ReasoningGraph extract_question_graph(const Sample& sample, Gateway& gateway,
                                      const TemplateStore& templates,
                                      const ExtractionOptions& options) {
  std::string base_prompt = templates.render(
      "question_graph_extraction",
      {{"question", sample.question},
       {"answer", sample.answer},
       {"context", render_context(sample.contexts)}});
  std::string last_reason;
  for (int attempt = 0; attempt <= options.max_parse_retries; ++attempt) {
    ChatRequest req;
    req.user_prompt = base_prompt + retry_suffix(attempt);
    req.temperature = options.temperature;
    req.max_output_tokens = options.max_output_tokens;
    req.seed = options.seed;
    std::string response = gateway.complete(req);
    try {
      json payload = parse_json_payload(response);
      payload["kind"] = "question_graph";
      ReasoningGraph g = graph_from_json(payload);
      if (g.nodes.empty()) {
        last_reason = "empty node set";
        continue;
      }
      if (!g.weakly_connected()) {
        // a reasoning chain is connected; allow one corrective round
        last_reason = "disconnected question graph";
        continue;
      }
      return g;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::parse && e.code() != ErrorCode::invalid_argument) throw;
      last_reason = e.what();
    } catch (const nlohmann::json::exception& e) {
      last_reason = e.what();
    }
  }
  raise(ErrorCode::extraction_parse,
        "question graph extraction failed for sample '" + sample.id + "': " + last_reason);
}

std::vector<Triplet> extract_triplets(const std::vector<Document>& contexts,
                                      Gateway& gateway, const TemplateStore& templates,
                                      const ExtractionOptions& options) {
  if (contexts.empty()) raise(ErrorCode::invalid_argument, "extract_triplets: no contexts");
  std::string haystack;
  for (const auto& d : contexts) {
    haystack += d.title;
    haystack += "\n";
    haystack += d.body;
    haystack += "\n";
  }
  std::string base_prompt =
      templates.render("triplet_extraction", {{"context", render_context(contexts)}});
  std::string last_reason;
  for (int attempt = 0; attempt <= options.max_parse_retries; ++attempt) {
    ChatRequest req;
    req.user_prompt = base_prompt + retry_suffix(attempt);
    req.temperature = options.temperature;
    req.max_output_tokens = options.max_output_tokens;
    req.seed = options.seed;
    std::string response = gateway.complete(req);
    try {
      json payload = parse_json_payload(response);
      std::vector<Triplet> raw = triplets_from_json(payload);
      std::vector<Triplet> kept;
      std::set<std::string> seen;
      for (auto& t : raw) {
        if (text::entity_key(t.subject.surface) == text::entity_key(t.object.surface)) {
          log::warn("dropping self-relating triplet on '" + t.subject.surface + "'");
          continue;
        }
        if (!surface_in_text(t.subject.surface, t.subject.aliases, haystack)) {
          log::warn("dropping triplet: subject '" + t.subject.surface +
                    "' absent from source text");
          continue;
        }
        if (!surface_in_text(t.object.surface, t.object.aliases, haystack)) {
          log::warn("dropping triplet: object '" + t.object.surface +
                    "' absent from source text");
          continue;
        }
        std::string key = text::entity_key(t.subject.surface) + "\x1f" + t.relation +
                          "\x1f" + text::entity_key(t.object.surface);
        if (!seen.insert(key).second) continue;
        kept.push_back(std::move(t));
      }
      return kept;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::parse) throw;
      last_reason = e.what();
    } catch (const nlohmann::json::exception& e) {
      last_reason = e.what();
    }
  }
  raise(ErrorCode::extraction_parse, "triplet extraction failed: " + last_reason);
}

}  // namespace seedforge
