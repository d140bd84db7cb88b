#include "seedforge/config.hpp"

#include "seedforge/json_io.hpp"
#include "seedforge/text.hpp"

namespace seedforge {

namespace {

using nlohmann::json;

BackendProfile profile_from_json(const std::string& role, const json& j,
                                 const std::filesystem::path& base_dir) {
  BackendProfile p;
  p.name = j.value("name", role);
  p.endpoint = j.value("endpoint", std::string("mock"));
  p.model = j.value("model", std::string());
  p.auth_env = j.value("auth_env", std::string());
  p.request_timeout = std::chrono::milliseconds(j.value("timeout_ms", 30000));
  p.retry.max_retries = j.value("max_retries", 2);
  p.retry.backoff_base = std::chrono::milliseconds(j.value("backoff_ms", 200));
  p.rate_limit_per_s = j.value("rate_limit_per_s", 0.0);
  p.embedding_model = j.value("embedding_model", std::string());
  if (j.contains("script")) {
    std::filesystem::path script = j.at("script").get<std::string>();
    if (!script.empty() && script.is_relative()) script = base_dir / script;
    p.script_path = script.string();
  }
  if (p.retry.max_retries < 0) raise(ErrorCode::invalid_argument, "max_retries must be >= 0");
  if (p.request_timeout.count() <= 0) raise(ErrorCode::invalid_argument, "timeout must be > 0");
  return p;
}

json profile_to_json(const BackendProfile& p) {
  return json{{"name", p.name},
              {"endpoint", p.endpoint},
              {"model", p.model},
              {"auth_env", p.auth_env},
              {"timeout_ms", p.request_timeout.count()},
              {"max_retries", p.retry.max_retries},
              {"backoff_ms", p.retry.backoff_base.count()},
              {"rate_limit_per_s", p.rate_limit_per_s},
              {"embedding_model", p.embedding_model},
              {"script", p.script_path}};
}

}  // namespace

json generation_config_to_json(const GenerationConfig& c) {
  json j{{"context_path", context_path_name(c.context_path)},
         {"n_probes", c.n_probes},
         {"max_attempts", c.max_attempts},
         {"equivalence_mode", equivalence_mode_name(c.equivalence_mode)},
         {"run_seed", c.run_seed},
         {"workers", c.workers},
         {"graph_node_budget", c.graph_node_budget},
         {"style_hint", c.style_hint},
         {"temperature_extraction", c.temperature_extraction},
         {"temperature_proposal", c.temperature_proposal},
         {"temperature_probe", c.temperature_probe}};
  if (c.perturbation_shift) j["perturbation_shift"] = *c.perturbation_shift;
  return j;
}

GenerationConfig generation_config_from_json(const json& j) {
  GenerationConfig c;
  if (j.contains("context_path")) {
    c.context_path = context_path_from_name(j.at("context_path").get<std::string>());
  }
  c.n_probes = j.value("n_probes", c.n_probes);
  c.max_attempts = j.value("max_attempts", c.max_attempts);
  if (j.contains("equivalence_mode")) {
    c.equivalence_mode = equivalence_mode_from_name(j.at("equivalence_mode").get<std::string>());
  }
  c.run_seed = j.value("run_seed", c.run_seed);
  if (j.contains("perturbation_shift") && !j.at("perturbation_shift").is_null()) {
    c.perturbation_shift = j.at("perturbation_shift").get<int>();
  }
  c.workers = j.value("workers", c.workers);
  c.graph_node_budget = j.value("graph_node_budget", c.graph_node_budget);
  c.style_hint = j.value("style_hint", c.style_hint);
  c.temperature_extraction = j.value("temperature_extraction", c.temperature_extraction);
  c.temperature_proposal = j.value("temperature_proposal", c.temperature_proposal);
  c.temperature_probe = j.value("temperature_probe", c.temperature_probe);
  if (c.n_probes < 1) raise(ErrorCode::invalid_argument, "n_probes must be >= 1");
  if (c.max_attempts < 1) raise(ErrorCode::invalid_argument, "max_attempts must be >= 1");
  return c;
}

ToolkitConfig ToolkitConfig::load(const std::string& source) {
  std::string trimmed = text::trim(source);
  if (!trimmed.empty() && trimmed.front() == '{') {
    json j = json::parse(trimmed, nullptr, false);
    if (j.is_discarded()) raise(ErrorCode::parse, "inline config is not valid JSON");
    return from_json(j, std::filesystem::current_path());
  }
  std::filesystem::path path = trimmed;
  json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) raise(ErrorCode::parse, "config file is not valid JSON: " + path.string());
  std::filesystem::path base =
      path.has_parent_path() ? path.parent_path() : std::filesystem::current_path();
  return from_json(j, std::filesystem::absolute(base));
}

ToolkitConfig ToolkitConfig::from_json(const json& j, const std::filesystem::path& base_dir) {
  ToolkitConfig c;
  auto resolve = [&base_dir](std::filesystem::path p) {
    if (p.is_relative()) p = base_dir / p;
    return p;
  };
  if (j.contains("profiles")) {
    for (auto it = j.at("profiles").begin(); it != j.at("profiles").end(); ++it) {
      c.profiles[it.key()] = profile_from_json(it.key(), it.value(), base_dir);
    }
  }
  c.templates_dir = resolve(j.value("templates_dir", std::string("templates")));
  c.data_dir = resolve(j.value("data_dir", std::string("data")));
  if (j.contains("cassette")) {
    const json& cj = j.at("cassette");
    c.cassette.mode = cassette_mode_from_name(cj.value("mode", std::string("off")));
    if (cj.contains("path")) c.cassette.path = resolve(cj.at("path").get<std::string>());
    if (c.cassette.mode != CassetteMode::off && c.cassette.path.empty()) {
      raise(ErrorCode::invalid_argument, "cassette mode set but no path given");
    }
  }
  if (j.contains("generation")) {
    c.generation = generation_config_from_json(j.at("generation"));
  }
  if (j.contains("evaluation")) {
    const json& ej = j.at("evaluation");
    c.evaluation.top_k = ej.value("top_k", 5);
    if (ej.contains("conditions")) {
      c.evaluation.conditions = ej.at("conditions").get<std::vector<std::string>>();
    }
    c.evaluation.temperature = ej.value("temperature", 0.0);
    c.evaluation.workers = ej.value("workers", 1);
    c.evaluation.max_output_tokens = ej.value("max_output_tokens", 256);
    if (ej.contains("external_retrievers")) {
      for (const auto& rj : ej.at("external_retrievers")) {
        ExternalRetrieverConfig r;
        r.name = rj.at("name").get<std::string>();
        r.kind = rj.value("kind", std::string("stdio"));
        r.command = rj.value("command", std::string());
        r.endpoint = rj.value("endpoint", std::string());
        if (r.kind != "stdio" && r.kind != "http") {
          raise(ErrorCode::invalid_argument, "external retriever kind must be stdio or http");
        }
        c.evaluation.external_retrievers.push_back(std::move(r));
      }
    }
  }
  return c;
}

json ToolkitConfig::to_json() const {
  json profiles = json::object();
  for (const auto& [role, p] : this->profiles) profiles[role] = profile_to_json(p);
  json retrievers = json::array();
  for (const auto& r : evaluation.external_retrievers) {
    retrievers.push_back(json{{"name", r.name},
                              {"kind", r.kind},
                              {"command", r.command},
                              {"endpoint", r.endpoint}});
  }
  return json{
      {"profiles", profiles},
      {"templates_dir", templates_dir.string()},
      {"data_dir", data_dir.string()},
      {"cassette", json{{"mode", cassette.mode == CassetteMode::off
                                     ? "off"
                                     : cassette.mode == CassetteMode::record ? "record"
                                                                             : "replay"},
                        {"path", cassette.path.string()}}},
      {"generation", generation_config_to_json(generation)},
      {"evaluation", json{{"top_k", evaluation.top_k},
                          {"conditions", evaluation.conditions},
                          {"temperature", evaluation.temperature},
                          {"workers", evaluation.workers},
                          {"max_output_tokens", evaluation.max_output_tokens},
                          {"external_retrievers", retrievers}}}};
}

const BackendProfile& ToolkitConfig::profile(const std::string& role) const {
  auto it = profiles.find(role);
  if (it == profiles.end()) {
    raise(ErrorCode::invalid_argument, "no backend profile configured for role '" + role + "'");
  }
  return it->second;
}

bool ToolkitConfig::has_profile(const std::string& role) const {
  return profiles.count(role) > 0;
}

}  // namespace seedforge
