#include "seedforge/verify.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "seedforge/log.hpp"
#include "seedforge/text.hpp"

namespace seedforge {

namespace {

// Selection markers for multiple-choice responses: "(B)", "[b]", "option b",
// "choice b", "answer is b", or the whole response being one letter/number.
std::vector<int> detect_choice_selections(const std::string& response,
                                          std::size_t n_choices) {
  std::vector<int> picks;
  auto push = [&picks, n_choices](int idx) {
    if (idx < 0 || idx >= static_cast<int>(n_choices)) return;
    for (int p : picks) {
      if (p == idx) return;
    }
    picks.push_back(idx);
  };

  // parenthesized letters in the raw response
  for (std::size_t i = 0; i + 2 < response.size(); ++i) {
    char open = response[i];
    char letter = response[i + 1];
    char close = response[i + 2];
    if ((open == '(' && close == ')') || (open == '[' && close == ']')) {
      if (std::isalpha(static_cast<unsigned char>(letter))) {
        push(std::tolower(static_cast<unsigned char>(letter)) - 'a');
      }
    }
  }

  auto tokens = text::normalize_tokens(response);
  auto token_index = [](const std::string& tok) -> int {
    if (tok.size() == 1 && tok[0] >= 'a' && tok[0] <= 'z') return tok[0] - 'a';
    if (tok.size() == 1 && tok[0] >= '1' && tok[0] <= '9') return tok[0] - '1';
    return -1;
  };
  if (tokens.size() == 1) {
    push(token_index(tokens[0]));
  }
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    if (tokens[i] == "option" || tokens[i] == "choice" || tokens[i] == "answer" ||
        tokens[i] == "is") {
      push(token_index(tokens[i + 1]));
    }
  }
  return picks;
}

}  // namespace

bool answer_contains(const std::string& response, const std::string& answer,
                     const std::optional<std::vector<std::string>>& choices) {
  if (text::trim(answer).empty()) {
    raise(ErrorCode::invalid_argument, "answer_contains: empty answer");
  }
  auto response_tokens = text::normalize_tokens(response);
  auto answer_tokens = text::normalize_tokens(answer);
  if (text::token_subsequence(response_tokens, answer_tokens)) return true;

  if (choices && !choices->empty()) {
    int correct = -1;
    std::string answer_norm = text::normalize_for_match(answer);
    for (std::size_t i = 0; i < choices->size(); ++i) {
      if (text::normalize_for_match((*choices)[i]) == answer_norm) {
        correct = static_cast<int>(i);
        break;
      }
    }
    if (correct >= 0) {
      auto picks = detect_choice_selections(response, choices->size());
      if (picks.size() == 1 && picks[0] == correct) return true;
    }
  }
  return false;
}

LeakageVerdict leakage_check(const std::string& question, const std::string& answer,
                             int n_probes, Gateway& gateway,
                             const TemplateStore& templates,
                             const std::optional<std::vector<std::string>>& choices,
                             const ProbeOptions& options) {
  if (n_probes < 1) raise(ErrorCode::invalid_argument, "n_probes must be >= 1");
  AnswerMatcher match = options.matcher;
  if (!match) {
    match = [](const std::string& r, const std::string& a,
               const std::optional<std::vector<std::string>>& c) {
      return answer_contains(r, a, c);
    };
  }

  std::string choices_block;
  if (choices && !choices->empty()) {
    choices_block = "\nCHOICES:\n";
    for (std::size_t i = 0; i < choices->size(); ++i) {
      choices_block += "(";
      choices_block += static_cast<char>('A' + i);
      choices_block += ") " + (*choices)[i] + "\n";
    }
  }
  std::string prompt = templates.render(
      "no_context_probe", {{"question", question}, {"choices_block", choices_block}});

  LeakageVerdict verdict;
  for (int i = 0; i < n_probes; ++i) {
    ChatRequest req;
    req.user_prompt = prompt;
    req.temperature = options.temperature;
    req.max_output_tokens = options.max_output_tokens;
    // distinct seeds keep the N probes from being trivially identical
    req.seed = options.seed_base + i;
    std::string response = gateway.complete(req);
    bool matched = match(response, answer, choices);
    verdict.probes.push_back({response, matched});
    if (matched) {
      verdict.leaked = true;
      break;  // early stop on first leak
    }
  }
  verdict.n_probes = static_cast<int>(verdict.probes.size());
  return verdict;
}

AbstentionDetector AbstentionDetector::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::io, "cannot open abstention patterns: " + path.string());
  AbstentionDetector d;
  std::string line;
  bool first = true;
  std::vector<std::string> patterns;
  while (std::getline(in, line)) {
    std::string trimmed = text::trim(line);
    if (first) {
      first = false;
      // "# abstention-patterns v<N>"
      std::istringstream hs(trimmed);
      std::string hash, tag, ver;
      hs >> hash >> tag >> ver;
      if (hash == "#" && tag == "abstention-patterns" && ver.size() >= 2 && ver[0] == 'v') {
        d.version_ = std::stoi(ver.substr(1));
        continue;
      }
    }
    if (trimmed.empty() || trimmed[0] == '#') continue;
    patterns.push_back(trimmed);
  }
  for (const auto& p : patterns) d.pattern_tokens_.push_back(text::normalize_tokens(p));
  return d;
}

AbstentionDetector AbstentionDetector::with_patterns(std::vector<std::string> patterns) {
  AbstentionDetector d;
  for (const auto& p : patterns) d.pattern_tokens_.push_back(text::normalize_tokens(p));
  return d;
}

bool AbstentionDetector::is_abstention(const std::string& response) const {
  auto tokens = text::normalize_tokens(response);
  if (tokens.empty()) return true;  // an empty reply asserts nothing
  for (const auto& pattern : pattern_tokens_) {
    if (text::token_subsequence(tokens, pattern)) return true;
  }
  return false;
}

QualityClass classify_quality(const std::string& question, const std::string& answer,
                              const std::string& context, const std::string& response,
                              Gateway& gateway, const TemplateStore& templates,
                              const AbstentionDetector& abstention,
                              const std::optional<std::vector<std::string>>& choices) {
  (void)question;
  QualityClass out;
  if (answer_contains(response, answer, choices)) {
    out.kind = QualityClassKind::leak;
    out.evidence = "response contains the correct answer";
    return out;
  }
  if (abstention.is_abstention(response)) {
    out.kind = QualityClassKind::non_leaking;
    out.evidence = "abstention";
    return out;
  }
  // confident wrong answer: does the context entail it?
  std::string prompt = templates.render(
      "entailment_probe", {{"context", context}, {"claim", text::trim(response)}});
  ChatRequest req;
  req.user_prompt = prompt;
  req.temperature = 0.0;
  req.max_output_tokens = 8;
  std::string entailment = gateway.complete(req);
  std::string norm = text::normalize_for_match(entailment);
  if (norm.rfind("yes", 0) == 0) {
    out.kind = QualityClassKind::non_leaking;
    out.evidence = "confident answer consistent with the generated context";
  } else {
    out.kind = QualityClassKind::factual_inconsistency;
    out.evidence = "confident answer contradicts the generated context";
  }
  return out;
}

}  // namespace seedforge
