#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "seedforge/evaluate.hpp"
#include "seedforge/gateway.hpp"
#include "seedforge/pipeline.hpp"

namespace seedforge {

struct ExternalRetrieverConfig {
  std::string name;
  std::string kind;  // "stdio" | "http"
  std::string command;
  std::string endpoint;
};

struct EvaluationConfig {
  int top_k = 5;
  std::vector<std::string> conditions = {"no_context", "gold"};
  std::vector<ExternalRetrieverConfig> external_retrievers;
  double temperature = 0.0;
  int workers = 1;
  int max_output_tokens = 256;
};

struct CassetteConfig {
  CassetteMode mode = CassetteMode::off;
  std::filesystem::path path;
};

// The single declarative config file (JSON). Relative paths resolve
// against the config file's directory.
struct ToolkitConfig {
  std::map<std::string, BackendProfile> profiles;
  std::filesystem::path templates_dir = "templates";
  std::filesystem::path data_dir = "data";
  CassetteConfig cassette;
  GenerationConfig generation;
  EvaluationConfig evaluation;

  // `source` is a path or an inline JSON object string.
  static ToolkitConfig load(const std::string& source);
  static ToolkitConfig from_json(const nlohmann::json& j,
                                 const std::filesystem::path& base_dir);

  nlohmann::json to_json() const;

  const BackendProfile& profile(const std::string& role) const;
  bool has_profile(const std::string& role) const;
};

nlohmann::json generation_config_to_json(const GenerationConfig& c);
GenerationConfig generation_config_from_json(const nlohmann::json& j);

}  // namespace seedforge
