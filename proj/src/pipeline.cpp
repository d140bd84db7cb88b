#include "seedforge/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "seedforge/config.hpp"
#include "seedforge/extraction.hpp"
#include "seedforge/json_io.hpp"
#include "seedforge/log.hpp"
#include "seedforge/text.hpp"
#include "seedforge/transform.hpp"

namespace seedforge {

namespace {

using nlohmann::json;

std::string iso_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// All generation randomness flows from (run_seed, seed_id, attempt, salt).
std::int64_t derive_seed(std::int64_t run_seed, const std::string& seed_id, int attempt,
                         const std::string& salt) {
  std::string canon = std::to_string(run_seed) + "\x1f" + seed_id + "\x1f" +
                      std::to_string(attempt) + "\x1f" + salt;
  return static_cast<std::int64_t>(text::fnv1a64(canon) & 0x7fffffffffffffffULL);
}

std::vector<Entity> mapping_domain(const ReasoningGraph& question_graph,
                                   const ReasoningGraph& context_graph,
                                   const Sample& seed) {
  std::vector<Entity> entities;
  std::set<std::string> seen;
  auto add = [&](const Entity& e) {
    std::string key = text::entity_key(e.surface) + "\x1f" + e.semantic_type;
    if (seen.insert(key).second) entities.push_back(e);
  };
  for (const auto& n : question_graph.nodes) add(n.entity);
  for (const auto& n : context_graph.nodes) add(n.entity);
  // the answer must be in the mapping domain for a' = M(a) to bite
  std::string answer_key = text::entity_key(seed.answer);
  bool answer_covered = false;
  for (const auto& e : entities) {
    if (text::entity_key(e.surface) == answer_key) answer_covered = true;
  }
  if (!answer_covered && !text::trim(seed.answer).empty()) {
    add(Entity{text::trim(seed.answer), "answer", {}});
  }
  return entities;
}

struct SeedGraphs {
  ReasoningGraph question_graph;
  std::vector<Triplet> triplets;
  ReasoningGraph context_graph;
};

}  // namespace

const char* generation_status_name(GenerationStatus s) {
  switch (s) {
    case GenerationStatus::accepted: return "accepted";
    case GenerationStatus::rejected_leakage: return "rejected_leakage";
    case GenerationStatus::rejected_structure: return "rejected_structure";
    case GenerationStatus::rejected_extraction: return "rejected_extraction";
    case GenerationStatus::budget_exhausted: return "budget_exhausted";
  }
  return "?";
}

const char* rejection_stage_name(RejectionStage s) {
  switch (s) {
    case RejectionStage::extraction: return "extraction";
    case RejectionStage::mapping: return "mapping";
    case RejectionStage::regeneration: return "regeneration";
    case RejectionStage::structure: return "structure";
    case RejectionStage::leakage: return "leakage";
  }
  return "?";
}

GenerationOutcome generate_one(const Sample& seed, const GenerationConfig& config,
                               const Backends& backends, const TemplateStore& templates,
                               const ProbeAuditSink& audit) {
  if (config.max_attempts < 1) raise(ErrorCode::invalid_argument, "max_attempts must be >= 1");
  if (config.n_probes < 1) raise(ErrorCode::invalid_argument, "n_probes must be >= 1");
  GenerationOutcome outcome;
  outcome.seed_id = seed.id;

  const bool perturbed = config.perturbation_shift.has_value();
  const ContextPath path =
      perturbed ? ContextPath::triplet_regeneration : config.context_path;

  // Seed graphs are attempt-invariant: extract once per seed.
  SeedGraphs seed_graphs;
  try {
    ExtractionOptions ext;
    ext.temperature = config.temperature_extraction;
    ext.seed = derive_seed(config.run_seed, seed.id, 0, "seed_extract");
    seed_graphs.question_graph =
        extract_question_graph(seed, *backends.generator, templates, ext);
    seed_graphs.triplets =
        extract_triplets(seed.contexts, *backends.generator, templates, ext);
    seed_graphs.context_graph = build_context_graph(seed_graphs.triplets);
  } catch (const Error& e) {
    outcome.status = GenerationStatus::rejected_extraction;
    outcome.attempts = 0;
    outcome.rejection_log.push_back({0, RejectionStage::extraction, e.what()});
    return outcome;
  }

  std::vector<Entity> entities =
      mapping_domain(seed_graphs.question_graph, seed_graphs.context_graph, seed);

  std::vector<std::string> exclusions;
  bool any_leak_rejection = false;
  bool all_failures_structural = true;

  for (int attempt = 1; attempt <= config.max_attempts; ++attempt) {
    outcome.attempts = attempt;

    // (2) propose a fresh mapping under the accumulated exclusions
    EntityMapping mapping;
    try {
      ProposalOptions prop;
      prop.temperature = config.temperature_proposal;
      prop.nonce = text::to_hex(static_cast<std::uint64_t>(
          derive_seed(config.run_seed, seed.id, attempt, "proposal_nonce")));
      prop.seed = derive_seed(config.run_seed, seed.id, attempt, "proposal");
      mapping = build_mapping_for_entities(entities, exclusions, *backends.generator,
                                           templates, prop);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::proposal_exhausted) {
        outcome.rejection_log.push_back({attempt, RejectionStage::mapping, e.what()});
        outcome.status = any_leak_rejection ? GenerationStatus::rejected_leakage
                                            : GenerationStatus::rejected_extraction;
        outcome.final_exclusions = exclusions;
        return outcome;
      }
      outcome.rejection_log.push_back({attempt, RejectionStage::mapping, e.what()});
      outcome.status = GenerationStatus::rejected_extraction;
      outcome.final_exclusions = exclusions;
      return outcome;
    }

    // (3) apply jointly to question/answer/context/choices
    Sample transformed = apply_mapping(seed, mapping);
    if (path == ContextPath::triplet_regeneration) {
      std::vector<Triplet> working = seed_graphs.triplets;
      if (perturbed) {
        std::vector<PerturbationNote> notes;
        working = cyclic_perturbation(working, *config.perturbation_shift, &notes);
        for (const auto& n : notes) {
          log::info("seed '" + seed.id + "': perturbation self-pairing repair at triplet " +
                    std::to_string(n.triplet_index));
        }
      }
      try {
        RegenerationOptions regen;
        regen.style_hint = config.style_hint;
        regen.seed = derive_seed(config.run_seed, seed.id, attempt, "regenerate");
        transformed.contexts =
            regenerate_context(working, mapping, *backends.generator, templates, regen);
        transformed.supporting_ids.reset();  // regenerated docs all support the answer
      } catch (const Error& e) {
        if (e.code() == ErrorCode::regeneration_incomplete) {
          outcome.rejection_log.push_back({attempt, RejectionStage::regeneration, e.what()});
          all_failures_structural = false;
          continue;  // fresh mapping next attempt
        }
        outcome.rejection_log.push_back({attempt, RejectionStage::regeneration, e.what()});
        outcome.status = GenerationStatus::rejected_extraction;
        outcome.final_exclusions = exclusions;
        return outcome;
      }
    }

    // (4) re-extract and require structural equivalence
    ReasoningGraph question_graph_t, context_graph_t;
    try {
      ExtractionOptions ext;
      ext.temperature = config.temperature_extraction;
      ext.seed = derive_seed(config.run_seed, seed.id, attempt, "re_extract");
      question_graph_t =
          extract_question_graph(transformed, *backends.generator, templates, ext);
      std::vector<Triplet> triplets_t =
          extract_triplets(transformed.contexts, *backends.generator, templates, ext);
      context_graph_t = build_context_graph(triplets_t);
    } catch (const Error& e) {
      outcome.rejection_log.push_back({attempt, RejectionStage::extraction, e.what()});
      outcome.status = GenerationStatus::rejected_extraction;
      outcome.final_exclusions = exclusions;
      return outcome;
    }

    // the perturbation study rewires structure on purpose, so its runs keep
    // only the leakage gate
    if (!perturbed) {
      try {
        EquivalenceReport eq_q =
            structurally_equivalent(seed_graphs.question_graph, question_graph_t,
                                    config.equivalence_mode, config.graph_node_budget);
        if (!eq_q.equivalent) {
          outcome.rejection_log.push_back(
              {attempt, RejectionStage::structure,
               std::string("question graph: ") +
                   equivalence_failure_name(*eq_q.failure_reason)});
          continue;  // discard, retry with a fresh mapping
        }
        EquivalenceReport eq_c =
            structurally_equivalent(seed_graphs.context_graph, context_graph_t,
                                    config.equivalence_mode, config.graph_node_budget);
        if (!eq_c.equivalent) {
          outcome.rejection_log.push_back(
              {attempt, RejectionStage::structure,
               std::string("context graph: ") +
                   equivalence_failure_name(*eq_c.failure_reason)});
          continue;
        }
      } catch (const Error& e) {
        // size_limit: skip the sample rather than fail silently
        outcome.rejection_log.push_back({attempt, RejectionStage::structure, e.what()});
        outcome.status = GenerationStatus::rejected_extraction;
        outcome.final_exclusions = exclusions;
        return outcome;
      }
    }

    // (5) leakage filter on (q', a')
    LeakageVerdict verdict;
    try {
      ProbeOptions probe;
      probe.temperature = config.temperature_probe;
      probe.seed_base = derive_seed(config.run_seed, seed.id, attempt, "probe");
      verdict = leakage_check(transformed.question, transformed.answer, config.n_probes,
                              *backends.verifier_probe, templates, transformed.choices,
                              probe);
    } catch (const Error& e) {
      // unverified is not clean: fail closed
      outcome.rejection_log.push_back({attempt, RejectionStage::leakage,
                                       std::string("unverified: ") + e.what()});
      outcome.status = GenerationStatus::rejected_extraction;
      outcome.final_exclusions = exclusions;
      return outcome;
    }
    if (audit) {
      for (std::size_t i = 0; i < verdict.probes.size(); ++i) {
        audit(json{{"seed_id", seed.id},
                   {"attempt", attempt},
                   {"probe_index", static_cast<int>(i)},
                   {"question", transformed.question},
                   {"response", verdict.probes[i].response},
                   {"matched", verdict.probes[i].matched}});
      }
    }
    if (verdict.leaked) {
      any_leak_rejection = true;
      all_failures_structural = false;
      // avoid previously tried entities on the next round
      for (const auto& p : mapping.pairs()) exclusions.push_back(p.replacement.surface);
      outcome.rejection_log.push_back(
          {attempt, RejectionStage::leakage,
           "probe " + std::to_string(verdict.n_probes) + " contained the answer"});
      continue;
    }

    // accepted
    GeneratedSample gen;
    gen.seed_id = seed.id;
    gen.sample = std::move(transformed);
    gen.mapping = mapping;
    gen.context_path = path;
    gen.question_graph = std::move(question_graph_t);
    gen.context_graph = std::move(context_graph_t);
    gen.provenance.attempts = attempt;
    gen.provenance.generator_backend = backends.generator->profile_name();
    gen.provenance.verifier_backend = backends.verifier_probe->profile_name();
    gen.provenance.timestamp = iso_timestamp();
    outcome.generated = std::move(gen);
    outcome.status = GenerationStatus::accepted;
    outcome.final_exclusions = exclusions;
    return outcome;
  }

  outcome.status = all_failures_structural ? GenerationStatus::rejected_structure
                                           : GenerationStatus::budget_exhausted;
  outcome.final_exclusions = exclusions;
  return outcome;
}

nlohmann::json manifest_to_json(const RunManifest& m) {
  json outcomes = json::object();
  for (const auto& [id, oj] : m.outcomes) outcomes[id] = oj;
  json usage = json::object();
  for (const auto& [k, v] : m.usage) usage[k] = v;
  json templates = json::object();
  for (const auto& [k, v] : m.template_versions) templates[k] = v;
  return json{{"version", m.version},
              {"config", m.config},
              {"template_versions", templates},
              {"seeds_path", m.seeds_path},
              {"seeds_sha256", m.seeds_sha256},
              {"seed_order", m.seed_order},
              {"outcomes", outcomes},
              {"usage", usage},
              {"started_at", m.started_at},
              {"finished_at", m.finished_at}};
}

RunManifest manifest_from_json(const nlohmann::json& j) {
  RunManifest m;
  m.version = j.value("version", 1);
  m.config = j.value("config", json::object());
  if (j.contains("template_versions")) {
    for (auto it = j.at("template_versions").begin(); it != j.at("template_versions").end();
         ++it) {
      m.template_versions[it.key()] = it.value().get<int>();
    }
  }
  m.seeds_path = j.value("seeds_path", std::string());
  m.seeds_sha256 = j.value("seeds_sha256", std::string());
  if (j.contains("seed_order")) {
    m.seed_order = j.at("seed_order").get<std::vector<std::string>>();
  }
  if (j.contains("outcomes")) {
    for (auto it = j.at("outcomes").begin(); it != j.at("outcomes").end(); ++it) {
      m.outcomes[it.key()] = it.value();
    }
  }
  if (j.contains("usage")) {
    for (auto it = j.at("usage").begin(); it != j.at("usage").end(); ++it) {
      m.usage[it.key()] = it.value().get<std::uint64_t>();
    }
  }
  m.started_at = j.value("started_at", std::string());
  m.finished_at = j.value("finished_at", std::string());
  return m;
}

namespace {

json outcome_summary(const GenerationOutcome& o) {
  json log = json::array();
  for (const auto& r : o.rejection_log) {
    log.push_back(json{{"attempt", r.attempt},
                       {"stage", rejection_stage_name(r.stage)},
                       {"reason", r.reason}});
  }
  return json{{"status", generation_status_name(o.status)},
              {"attempts", o.attempts},
              {"rejections", log}};
}

}  // namespace

BenchmarkRun generate_benchmark(const std::filesystem::path& seeds_path,
                                const std::filesystem::path& out_dir,
                                const GenerationConfig& config, const Backends& backends,
                                const TemplateStore& templates,
                                std::shared_ptr<GatewayUsage> generator_usage,
                                std::shared_ptr<GatewayUsage> probe_usage) {
  std::vector<Sample> seeds = read_samples(seeds_path);
  for (const auto& s : seeds) {
    auto violations = validate_sample(s);
    if (!violations.empty()) {
      raise(ErrorCode::invalid_argument, "seed '" + s.id + "' invalid: " +
                                             violations.front().field + ": " +
                                             violations.front().rule);
    }
  }
  std::set<std::string> id_set;
  for (const auto& s : seeds) {
    if (!id_set.insert(s.id).second) {
      raise(ErrorCode::invalid_argument, "duplicate seed id '" + s.id + "'");
    }
  }

  std::filesystem::create_directories(out_dir);
  std::filesystem::path manifest_path = out_dir / "manifest.json";
  std::filesystem::path benchmark_path = out_dir / "benchmark.jsonl";
  std::filesystem::path partial_path = out_dir / "benchmark.partial.jsonl";
  std::filesystem::path probes_path = out_dir / "probes.jsonl";

  RunManifest manifest;
  std::map<std::string, GeneratedSample> accepted_by_id;

  // resume: skip seeds already accepted under the existing manifest
  if (std::filesystem::exists(manifest_path)) {
    json mj = json::parse(read_file(manifest_path), nullptr, false);
    if (mj.is_discarded()) raise(ErrorCode::parse, "manifest corrupt: " + manifest_path.string());
    manifest = manifest_from_json(mj);
    for (const auto& src : {partial_path, benchmark_path}) {
      if (!std::filesystem::exists(src)) continue;
      for (auto& g : read_generated(src)) accepted_by_id[g.seed_id] = std::move(g);
    }
  } else {
    manifest.started_at = iso_timestamp();
  }
  manifest.config = generation_config_to_json(config);
  manifest.template_versions = templates.versions();
  manifest.seeds_path = seeds_path.string();
  manifest.seeds_sha256 = sha256_hex(read_file(seeds_path));
  manifest.seed_order.clear();
  for (const auto& s : seeds) manifest.seed_order.push_back(s.id);
  if (manifest.started_at.empty()) manifest.started_at = iso_timestamp();

  std::mutex io_mu;
  auto persist_manifest = [&] {
    write_file_atomic(manifest_path, manifest_to_json(manifest).dump(2) + "\n");
  };
  auto audit_sink = [&](const json& entry) {
    std::lock_guard lock(io_mu);
    std::ofstream out(probes_path, std::ios::app);
    out << entry.dump() << "\n";
  };

  std::vector<const Sample*> todo;
  for (const auto& s : seeds) {
    auto it = manifest.outcomes.find(s.id);
    bool done = it != manifest.outcomes.end() &&
                it->second.value("status", std::string()) == "accepted" &&
                accepted_by_id.count(s.id) > 0;
    if (!done) todo.push_back(&s);
  }

  std::vector<GenerationOutcome> new_outcomes(todo.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= todo.size()) return;
      GenerationOutcome outcome =
          generate_one(*todo[i], config, backends, templates, audit_sink);
      {
        std::lock_guard lock(io_mu);
        manifest.outcomes[outcome.seed_id] = outcome_summary(outcome);
        if (outcome.generated) {
          accepted_by_id[outcome.seed_id] = *outcome.generated;
          std::ofstream out(partial_path, std::ios::app);
          out << to_json(*outcome.generated).dump() << "\n";
        }
        persist_manifest();
      }
      new_outcomes[i] = std::move(outcome);
    }
  };
  int n_threads = std::max(1, std::min<int>(config.workers, static_cast<int>(todo.size())));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // canonical outputs: benchmark.jsonl ordered by seed input order
  BenchmarkRun run;
  for (const auto& s : seeds) {
    auto it = accepted_by_id.find(s.id);
    if (it != accepted_by_id.end()) run.accepted.push_back(it->second);
  }
  run.outcomes = std::move(new_outcomes);

  if (generator_usage) {
    manifest.usage["generator_complete_calls"] = generator_usage->complete_calls.load();
    manifest.usage["generator_embed_calls"] = generator_usage->embed_calls.load();
  }
  if (probe_usage) {
    manifest.usage["probe_complete_calls"] = probe_usage->complete_calls.load();
  }
  manifest.finished_at = iso_timestamp();
  write_generated(benchmark_path, run.accepted);
  std::error_code ec;
  std::filesystem::remove(partial_path, ec);
  persist_manifest();
  run.manifest = manifest;
  return run;
}

std::vector<BenchmarkRun> regenerate(const std::filesystem::path& seeds_path,
                                     const std::filesystem::path& out_dir,
                                     const GenerationConfig& base_config,
                                     const std::vector<std::int64_t>& run_seeds,
                                     const Backends& backends,
                                     const TemplateStore& templates) {
  std::vector<BenchmarkRun> runs;
  json rows = json::array();
  for (std::size_t i = 0; i < run_seeds.size(); ++i) {
    GenerationConfig config = base_config;
    config.run_seed = run_seeds[i];
    char dirname[32];
    std::snprintf(dirname, sizeof(dirname), "run_%03zu", i);
    std::filesystem::path run_dir = out_dir / dirname;
    BenchmarkRun run =
        generate_benchmark(seeds_path, run_dir, config, backends, templates);

    std::map<std::string, int> counts;
    double attempts_sum = 0.0;
    int attempts_n = 0;
    for (const auto& [id, oj] : run.manifest.outcomes) {
      counts[oj.value("status", std::string("?"))] += 1;
      attempts_sum += oj.value("attempts", 0);
      ++attempts_n;
    }
    json counts_json = json::object();
    for (const auto& [k, v] : counts) counts_json[k] = v;
    rows.push_back(json{{"run_index", i},
                        {"run_seed", run_seeds[i]},
                        {"dir", dirname},
                        {"n_accepted", run.accepted.size()},
                        {"status_counts", counts_json},
                        {"mean_attempts", attempts_n ? attempts_sum / attempts_n : 0.0}});
    runs.push_back(std::move(run));
  }
  write_file_atomic(out_dir / "runs.json", json{{"runs", rows}}.dump(2) + "\n");
  return runs;
}

}  // namespace seedforge
