#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "seedforge/gateway.hpp"
#include "seedforge/graph.hpp"
#include "seedforge/model.hpp"
#include "seedforge/templates.hpp"
#include "seedforge/verify.hpp"

namespace seedforge {

struct GenerationConfig {
  ContextPath context_path = ContextPath::surface_substitution;
  int n_probes = 3;
  int max_attempts = 5;
  EquivalenceMode equivalence_mode = EquivalenceMode::strict;
  std::int64_t run_seed = 0;
  // Study mode: cyclic shift applied to the triplets before regeneration;
  // implies the triplet_regeneration path and skips the context-graph gate.
  std::optional<int> perturbation_shift;
  int workers = 1;
  int graph_node_budget = 64;
  std::string style_hint = "encyclopedic paragraph, one paragraph per connected component";
  double temperature_extraction = 0.0;
  double temperature_proposal = 0.8;
  double temperature_probe = 0.7;
};

struct Backends {
  std::shared_ptr<Gateway> generator;
  std::shared_ptr<Gateway> verifier_probe;
  std::shared_ptr<Gateway> embedder;  // unused by generation; carried for manifests
};

enum class GenerationStatus {
  accepted,
  rejected_leakage,
  rejected_structure,
  rejected_extraction,
  budget_exhausted,
};

const char* generation_status_name(GenerationStatus s);

enum class RejectionStage { extraction, mapping, regeneration, structure, leakage };

const char* rejection_stage_name(RejectionStage s);

struct RejectionEvent {
  int attempt = 0;
  RejectionStage stage = RejectionStage::extraction;
  std::string reason;
};

struct GenerationOutcome {
  std::string seed_id;
  GenerationStatus status = GenerationStatus::budget_exhausted;
  int attempts = 0;
  std::optional<GeneratedSample> generated;
  std::vector<RejectionEvent> rejection_log;
  // Exclusion set after the final attempt; non-decreasing across attempts.
  std::vector<std::string> final_exclusions;
};

// Sink for leakage-probe audit entries (JSONL in generate_benchmark runs).
using ProbeAuditSink = std::function<void(const nlohmann::json& entry)>;

// One seed through the full loop: extract, map, rewrite, re-extract, check
// structure, check leakage, retry under budget. Never throws per-sample;
// failures encode into the outcome.
GenerationOutcome generate_one(const Sample& seed, const GenerationConfig& config,
                               const Backends& backends,
                               const TemplateStore& templates,
                               const ProbeAuditSink& audit = {});

struct RunManifest {
  int version = 1;
  nlohmann::json config;
  std::map<std::string, int> template_versions;
  std::string seeds_path;
  std::string seeds_sha256;
  std::vector<std::string> seed_order;
  std::map<std::string, nlohmann::json> outcomes;  // seed_id -> outcome summary
  std::map<std::string, std::uint64_t> usage;      // e.g. generator_complete_calls
  std::string started_at;
  std::string finished_at;
};

nlohmann::json manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

struct BenchmarkRun {
  std::vector<GeneratedSample> accepted;
  std::vector<GenerationOutcome> outcomes;
  RunManifest manifest;
};

// Full run over a seeds file into out_dir: benchmark.jsonl (canonical seed
// order), manifest.json (atomic updates), probes.jsonl audit log. Rerunning
// over an existing manifest skips seeds already accepted. Seeds must be
// valid (pre); violations throw Error(invalid_argument).
BenchmarkRun generate_benchmark(const std::filesystem::path& seeds_path,
                                const std::filesystem::path& out_dir,
                                const GenerationConfig& config,
                                const Backends& backends,
                                const TemplateStore& templates,
                                std::shared_ptr<GatewayUsage> generator_usage = nullptr,
                                std::shared_ptr<GatewayUsage> probe_usage = nullptr);

// Repeated generation under distinct run seeds; outputs under
// out_dir/run_NNN, per-run metric rows in out_dir/runs.json.
std::vector<BenchmarkRun> regenerate(const std::filesystem::path& seeds_path,
                                     const std::filesystem::path& out_dir,
                                     const GenerationConfig& base_config,
                                     const std::vector<std::int64_t>& run_seeds,
                                     const Backends& backends,
                                     const TemplateStore& templates);

}  // namespace seedforge
