#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "seedforge/gateway.hpp"
#include "seedforge/model.hpp"
#include "seedforge/templates.hpp"

namespace seedforge {

// Pluggable answer matcher; the default is normalized token-boundary
// containment (see answer_contains).
using AnswerMatcher = std::function<bool(const std::string& response,
                                         const std::string& answer,
                                         const std::optional<std::vector<std::string>>& choices)>;

// True iff the normalized answer occurs as a token-boundary substring of
// the normalized response, or (multiple choice) the response unambiguously
// selects the correct choice's letter/index.
bool answer_contains(const std::string& response, const std::string& answer,
                     const std::optional<std::vector<std::string>>& choices = std::nullopt);

struct Probe {
  std::string response;
  bool matched = false;
};

struct LeakageVerdict {
  bool leaked = false;
  std::vector<Probe> probes;  // stops early on first match
  int n_probes = 0;
};

struct ProbeOptions {
  double temperature = 0.7;
  int max_output_tokens = 128;
  std::int64_t seed_base = 0;  // probe i uses a seed derived from this
  AnswerMatcher matcher;       // empty -> answer_contains
};

// Up to n_probes no-context completions of `question`; leaked iff any
// response contains `answer`. Probes are recorded verbatim for audit.
// Gateway errors propagate (callers treat the sample as unverified, never
// as clean).
LeakageVerdict leakage_check(const std::string& question, const std::string& answer,
                             int n_probes, Gateway& gateway,
                             const TemplateStore& templates,
                             const std::optional<std::vector<std::string>>& choices = std::nullopt,
                             const ProbeOptions& options = {});

struct QualityClass {
  QualityClassKind kind = QualityClassKind::non_leaking;
  std::string evidence;
};

// Curated abstention patterns, one per line; versioned data file with a
// "# abstention-patterns v<N>" header.
class AbstentionDetector {
 public:
  static AbstentionDetector load_file(const std::filesystem::path& path);
  static AbstentionDetector with_patterns(std::vector<std::string> patterns);

  bool is_abstention(const std::string& response) const;
  int version() const { return version_; }

 private:
  std::vector<std::vector<std::string>> pattern_tokens_;
  int version_ = 0;
};

// Three-way classification of a no-context response, precedence
// leak > factual_inconsistency > non_leaking. Confident wrong answers are
// checked against the context with one entailment probe.
QualityClass classify_quality(const std::string& question, const std::string& answer,
                              const std::string& context, const std::string& response,
                              Gateway& gateway, const TemplateStore& templates,
                              const AbstentionDetector& abstention,
                              const std::optional<std::vector<std::string>>& choices = std::nullopt);

}  // namespace seedforge
