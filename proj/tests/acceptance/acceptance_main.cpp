// Acceptance suite: every criterion prints one PASS/FAIL line; the binary
// exits nonzero if any required criterion fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "seedforge/evaluate.hpp"
#include "seedforge/graph.hpp"
#include "seedforge/json_io.hpp"
#include "seedforge/pipeline.hpp"
#include "seedforge/retriever.hpp"
#include "seedforge/transform.hpp"
#include "support/fake_model.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"

using namespace seedforge;
using nlohmann::json;

namespace {

int g_failures = 0;

void criterion(const std::string& name, double budget_seconds,
               const std::function<void()>& body) {
  auto start = std::chrono::steady_clock::now();
  std::string failure;
  try {
    body();
  } catch (const std::exception& e) {
    failure = e.what();
  }
  double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (failure.empty() && budget_seconds > 0 && elapsed > budget_seconds) {
    std::ostringstream os;
    os << "runtime " << elapsed << "s exceeds budget " << budget_seconds << "s";
    failure = os.str();
  }
  if (failure.empty()) {
    std::printf("[PASS] %-28s (%.2fs)\n", name.c_str(), elapsed);
  } else {
    std::printf("[FAIL] %-28s (%.2fs) %s\n", name.c_str(), elapsed, failure.c_str());
    ++g_failures;
  }
  std::fflush(stdout);
}

void require(bool cond, const std::string& message) {
  if (!cond) throw std::runtime_error(message);
}

template <typename T>
void require_eq(const T& got, const T& want, const std::string& what) {
  if (!(got == want)) {
    std::ostringstream os;
    os << what << ": got " << got << ", want " << want;
    throw std::runtime_error(os.str());
  }
}

const TemplateStore& templates() {
  static TemplateStore store =
      TemplateStore::load_dir(std::filesystem::path(SEEDFORGE_REPO_DIR) / "templates");
  return store;
}

std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "seedforge-acceptance" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::vector<EvalRecord> records_of(int correct, int total, ConditionKind kind) {
  std::vector<EvalRecord> out;
  for (int i = 0; i < total; ++i) {
    EvalRecord r;
    r.sample_id = "s" + std::to_string(i);
    r.condition = kind;
    r.correct = i < correct;
    out.push_back(std::move(r));
  }
  return out;
}

// ---- criterion 1: metric arithmetic from the published per-condition rows ----
void metric_arithmetic() {
  struct Row {
    const char* dataset;
    int no_ctx_of_1000;
    int gold_of_1000;
    double want_answerability;
  };
  // per-condition accuracies of the frontier-model rows, denominator 1000
  const Row rows[] = {
      {"hotpotqa-orig", 500, 838, 0.338},
      {"hotpotqa-fresh", 14, 432, 0.418},
      {"wikihop-orig", 629, 829, 0.200},
      {"qasc-orig", 750, 930, 0.180},
  };
  for (const Row& row : rows) {
    auto m = compute_metrics(records_of(row.no_ctx_of_1000, 1000, ConditionKind::no_context),
                             records_of(row.gold_of_1000, 1000, ConditionKind::gold),
                             row.dataset, "frontier");
    require(std::abs(m.leakage_error - row.no_ctx_of_1000 / 1000.0) < 1e-9,
            std::string(row.dataset) + ": leakage error mismatch");
    require(std::abs(m.answerability_accuracy - row.want_answerability) < 1e-9,
            std::string(row.dataset) + ": answerability mismatch");
    require(m.leakage_error == m.acc_no_ctx, "identity leakage == acc_no_ctx broken");
  }
}

// ---- criterion 2: VF2 vs the all-permutations oracle ----
void isomorphism_oracle() {
  std::mt19937_64 rng(0xACC2);
  int checked = 0;
  for (int i = 0; i < 250; ++i) {
    auto g1 = seedforge::testing::random_graph(rng);
    ReasoningGraph g2 = (i % 2 == 0) ? seedforge::testing::relabeled_copy(g1, rng)
                                     : seedforge::testing::perturbed_copy(g1, rng);
    for (EquivalenceMode mode : {EquivalenceMode::strict, EquivalenceMode::relaxed}) {
      bool expected = seedforge::testing::isomorphic_brute_force(g1, g2, mode);
      bool got = structurally_equivalent(g1, g2, mode).equivalent;
      require(got == expected,
              "disagreement with oracle on pair " + std::to_string(i) + " (" +
                  equivalence_mode_name(mode) + ")");
      ++checked;
    }
  }
  require_eq(checked, 500, "pair count");
}

// ---- criterion 3: graph statistics invariant under renaming ----
void stat_invariance() {
  std::mt19937_64 rng(0xACC3);
  for (int i = 0; i < 200; ++i) {
    auto g = seedforge::testing::random_graph(rng);
    auto renamed = seedforge::testing::relabeled_copy(g, rng);
    GraphStats a = graph_stats(g);
    GraphStats b = graph_stats(renamed);
    require(a == b, "stats changed under renaming at round " + std::to_string(i));
  }
}

// ---- criterion 4: cyclic perturbation changes structure, keeps entities ----
void perturbation_mechanism() {
  // 3-node chain, k=1: no longer equivalent even in relaxed mode
  std::vector<Triplet> chain{{{"A", "t", {}}, "r1", {"B", "t", {}}},
                             {{"B", "t", {}}, "r2", {"C", "t", {}}}};
  auto perturbed = cyclic_perturbation(chain, 1);
  auto report = structurally_equivalent(build_context_graph(chain),
                                        build_context_graph(perturbed),
                                        EquivalenceMode::relaxed);
  require(!report.equivalent, "3-chain with k=1 should not stay equivalent");

  // entity multiset preserved: subjects and objects drawn from disjoint
  // pools so the self-pairing repair never fires (see decisions ledger)
  std::mt19937_64 rng(0xACC4);
  for (int round = 0; round < 200; ++round) {
    int n = 2 + static_cast<int>(rng() % 7);
    std::vector<Triplet> in;
    for (int i = 0; i < n; ++i) {
      in.push_back({{"S" + std::to_string(i), "t", {}},
                    "r" + std::to_string(i % 3),
                    {"O" + std::to_string(rng() % n), "t", {}}});
    }
    auto out = cyclic_perturbation(in, static_cast<int>(rng() % 12));
    auto multiset_of = [](const std::vector<Triplet>& ts) {
      std::vector<std::string> m;
      for (const auto& t : ts) {
        m.push_back(t.subject.surface);
        m.push_back(t.object.surface);
      }
      std::sort(m.begin(), m.end());
      return m;
    };
    require(multiset_of(in) == multiset_of(out),
            "entity multiset changed at round " + std::to_string(round));
  }
}

// shared fixture rig for the pipeline criteria
struct Rig {
  std::vector<Sample> seeds;
  std::shared_ptr<seedforge::testing::FakeModel> model;
  Backends backends;

  explicit Rig(const seedforge::testing::FixtureSpec& spec) {
    seeds = seedforge::testing::make_fixture_seeds(spec);
    model = std::make_shared<seedforge::testing::FakeModel>(
        seeds, seedforge::testing::fixture_entity_types(seeds));
    auto gw = model->as_gateway();
    backends = {gw, gw, gw};
  }
};

seedforge::testing::FixtureSpec twenty_seed_spec() {
  seedforge::testing::FixtureSpec spec;
  spec.n_seeds = 20;
  spec.leak_first_attempt = {2, 5, 11, 16};
  spec.leak_always = {7, 13};
  return spec;
}

// ---- criterion 5: end-to-end leakage-filter safety ----
void leakage_filter_safety() {
  Rig rig(twenty_seed_spec());
  auto dir = fresh_dir("safety");
  auto seeds_path = dir / "seeds.jsonl";
  write_samples(seeds_path, rig.seeds);

  GenerationConfig config;
  auto run = generate_benchmark(seeds_path, dir, config, rig.backends, templates());
  require_eq(static_cast<int>(run.accepted.size()), 18, "accepted count");

  // zero accepted samples with a leaked verdict in their final attempt
  std::map<std::string, std::pair<int, bool>> final_attempt;  // seed -> (attempt, any leak)
  for (const auto& row : read_jsonl(dir / "probes.jsonl")) {
    auto& slot = final_attempt[row.at("seed_id").get<std::string>()];
    int attempt = row.at("attempt").get<int>();
    bool matched = row.at("matched").get<bool>();
    if (attempt > slot.first) {
      slot = {attempt, matched};
    } else if (attempt == slot.first) {
      slot.second = slot.second || matched;
    }
  }
  for (const auto& g : run.accepted) {
    auto it = final_attempt.find(g.seed_id);
    require(it != final_attempt.end(), "accepted sample missing from the probe audit log");
    require(!it->second.second,
            "accepted sample " + g.seed_id + " has a leaked final verdict");
  }

  // exclusions grow monotonically: every leaked attempt adds 3 fresh surfaces
  for (const auto& outcome : run.outcomes) {
    int leak_attempts = 0;
    for (const auto& r : outcome.rejection_log) {
      if (r.stage == RejectionStage::leakage) ++leak_attempts;
    }
    std::set<std::string> unique(outcome.final_exclusions.begin(),
                                 outcome.final_exclusions.end());
    require_eq(static_cast<int>(outcome.final_exclusions.size()), 3 * leak_attempts,
               "exclusion growth for " + outcome.seed_id);
    require_eq(static_cast<int>(unique.size()),
               static_cast<int>(outcome.final_exclusions.size()),
               "exclusions duplicated for " + outcome.seed_id);
  }

  // the always-leaking seeds exhausted their budget
  int exhausted = 0;
  for (const auto& [id, oj] : run.manifest.outcomes) {
    exhausted += oj.value("status", std::string()) == "budget_exhausted" ? 1 : 0;
  }
  require_eq(exhausted, 2, "budget_exhausted count");
}

std::string scrubbed_manifest(const std::filesystem::path& path) {
  json j = json::parse(read_file(path));
  j.erase("started_at");
  j.erase("finished_at");
  return j.dump();
}

std::string scrubbed_benchmark(const std::filesystem::path& path) {
  std::string out;
  for (const auto& row : read_jsonl(path)) {
    json r = row;
    if (r.contains("provenance")) r["provenance"].erase("timestamp");
    out += r.dump();
    out += "\n";
  }
  return out;
}

// ---- criterion 6: determinism and resumability ----
void determinism_resumability() {
  auto spec = twenty_seed_spec();
  auto base = fresh_dir("determinism");
  auto seeds_path = base / "seeds.jsonl";
  {
    Rig rig(spec);
    write_samples(seeds_path, rig.seeds);
  }
  auto cassette_path = base / "cassette.jsonl";
  GenerationConfig config;
  config.run_seed = 7;

  auto run_once = [&](const std::filesystem::path& out_dir, CassetteMode mode) {
    Rig rig(spec);
    auto store = std::make_shared<CassetteStore>(cassette_path,
                                                 mode == CassetteMode::replay);
    // replay keeps the same (never-touched) inner so provenance names match
    std::shared_ptr<Gateway> inner = rig.backends.generator;
    auto usage_gen = std::make_shared<GatewayUsage>();
    auto usage_probe = std::make_shared<GatewayUsage>();
    Backends b;
    b.generator = std::make_shared<InstrumentedGateway>(
        std::make_shared<CassetteGateway>(mode, store, inner), usage_gen);
    b.verifier_probe = std::make_shared<InstrumentedGateway>(
        std::make_shared<CassetteGateway>(mode, store, inner), usage_probe);
    b.embedder = b.generator;
    generate_benchmark(seeds_path, out_dir, config, b, templates(), usage_gen, usage_probe);
  };

  auto dir_record = fresh_dir("determinism/record");
  run_once(dir_record, CassetteMode::record);
  auto dir_replay1 = fresh_dir("determinism/replay1");
  run_once(dir_replay1, CassetteMode::replay);

  // second replay through the CLI binary: the user-facing `generate` path
  auto dir_replay2 = fresh_dir("determinism/replay2");
  {
    json cfg{{"templates_dir",
              (std::filesystem::path(SEEDFORGE_REPO_DIR) / "templates").string()},
             {"data_dir", (std::filesystem::path(SEEDFORGE_REPO_DIR) / "data").string()},
             {"profiles",
              json{{"generator", json{{"name", "mock"}, {"endpoint", "mock"}}},
                   {"verifier_probe", json{{"name", "mock"}, {"endpoint", "mock"}}},
                   {"embedder", json{{"name", "mock"}, {"endpoint", "mock"}}}}},
             {"cassette", json{{"mode", "replay"}, {"path", cassette_path.string()}}},
             {"generation", json{{"run_seed", 7}, {"workers", 1}}}};
    auto cfg_path = base / "replay-config.json";
    write_file_atomic(cfg_path, cfg.dump(2));
    std::string cmd = std::string(SEEDFORGE_CLI_PATH) + " generate --config " +
                      cfg_path.string() + " --seeds " + seeds_path.string() + " --out " +
                      dir_replay2.string() + " > " + (base / "cli.log").string() + " 2>&1";
    int rc = std::system(cmd.c_str());
    require(rc == 0, "CLI replay run failed, see " + (base / "cli.log").string());
  }

  std::string m1 = scrubbed_manifest(dir_record / "manifest.json");
  std::string m2 = scrubbed_manifest(dir_replay1 / "manifest.json");
  std::string m3 = scrubbed_manifest(dir_replay2 / "manifest.json");
  require(m1 == m2, "record vs replay manifest differ");
  require(m2 == m3, "library replay vs CLI replay manifest differ");

  std::string b1 = scrubbed_benchmark(dir_record / "benchmark.jsonl");
  std::string b2 = scrubbed_benchmark(dir_replay1 / "benchmark.jsonl");
  std::string b3 = scrubbed_benchmark(dir_replay2 / "benchmark.jsonl");
  require(b1 == b2, "record vs replay benchmark differ");
  require(b2 == b3, "library replay vs CLI replay benchmark differ");

  // interrupt-and-resume: finishing a half-done run costs exactly the calls
  // of the remaining seeds, i.e. zero duplicate generator calls
  auto count_calls = [&](const std::vector<Sample>& seeds,
                         const std::filesystem::path& dir,
                         std::shared_ptr<seedforge::testing::FakeModel> model,
                         const std::filesystem::path& file) {
    auto usage = std::make_shared<GatewayUsage>();
    auto gw = model->as_gateway();
    Backends b;
    b.generator = std::make_shared<InstrumentedGateway>(gw, usage);
    b.verifier_probe = std::make_shared<InstrumentedGateway>(gw, usage);
    b.embedder = b.generator;
    write_samples(file, seeds);
    generate_benchmark(file, dir, config, b, templates());
    return usage->complete_calls.load();
  };

  Rig full_rig(spec);
  auto dir_full = fresh_dir("determinism/full");
  auto full_calls = count_calls(full_rig.seeds, dir_full, full_rig.model,
                                base / "seeds-full-a.jsonl");

  // interrupt after a fully-accepted prefix (seed-7 onward is untouched);
  // only accepted seeds are skipped on resume, so the call counts must add
  // up exactly: zero duplicate generator calls for finished work
  Rig resume_rig(spec);
  auto dir_resume = fresh_dir("determinism/resume");
  std::vector<Sample> prefix(resume_rig.seeds.begin(), resume_rig.seeds.begin() + 7);
  auto prefix_calls = count_calls(prefix, dir_resume, resume_rig.model,
                                  base / "seeds-prefix.jsonl");
  auto resume_calls = count_calls(resume_rig.seeds, dir_resume, resume_rig.model,
                                  base / "seeds-full-b.jsonl");
  require(prefix_calls + resume_calls == full_calls,
          "resume repeated generator calls: " + std::to_string(prefix_calls) + " + " +
              std::to_string(resume_calls) + " != " + std::to_string(full_calls));
  auto final_run = read_generated(dir_resume / "benchmark.jsonl");
  require_eq(static_cast<int>(final_run.size()), 18, "resumed benchmark size");
}

// ---- criterion 7: substitution property suite ----
void substitution_properties() {
  std::mt19937_64 rng(0xACC7);
  const char* seed_pool[] = {"Arden Vale", "Bryn Mawr",  "Cield",   "Dorim Keep",
                             "Elstrand",   "Ferrow",     "Galbraith", "Hollen March"};
  const char* repl_pool[] = {"Quorix",     "Ravenna Holt", "Sylmar",  "Tovak Ridge",
                             "Umbra Point", "Vexley",      "Wrenfall", "Yarrow Deep"};
  int cases = 0;
  for (int round = 0; round < 250; ++round) {
    int n = 1 + static_cast<int>(rng() % 8);
    std::vector<MappingPair> pairs;
    for (int i = 0; i < n; ++i) {
      pairs.push_back({Entity{seed_pool[i], "t", {}}, Entity{repl_pool[i], "t", {}}});
    }
    auto mapping = EntityMapping::create(pairs, {});

    std::string text;
    int words = 2 + static_cast<int>(rng() % 14);
    for (int w = 0; w < words; ++w) {
      if (!text.empty()) text += " ";
      text += (rng() % 3 == 0) ? seed_pool[rng() % n]
                               : "word" + std::to_string(rng() % 40);
    }

    // simultaneity / untouched bytes / inverse restoration
    std::string mapped = apply_mapping_to_text(text, mapping);
    std::string restored = apply_mapping_to_text(mapped, mapping.inverse());
    require(restored == text, "inverse failed at round " + std::to_string(round));
    ++cases;

    for (const auto& p : mapping.pairs()) {
      require(mapped.find(p.seed.surface) == std::string::npos,
              "seed surface survived mapping");
    }
    ++cases;

    // longest-match: a mapping with nested surfaces picks the longer one
    auto nested = EntityMapping::create(
        {{Entity{"New York", "city", {}}, Entity{repl_pool[0], "city", {}}},
         {Entity{"York", "city", {}}, Entity{repl_pool[1], "city", {}}}},
        {});
    std::string nested_out = apply_mapping_to_text("Go to New York now", nested);
    require(nested_out == std::string("Go to ") + repl_pool[0] + " now",
            "longest-match violated");
    ++cases;

    // simultaneity: output matching another pair's alias is never rescanned
    auto shadow = EntityMapping::create(
        {{Entity{"Alpha", "t", {}}, Entity{"Bridged", "t", {}}},
         {Entity{"Gamma", "t", {"Bridged"}}, Entity{"Delta", "t", {}}}},
        {});
    require(apply_mapping_to_text("Alpha Gamma", shadow) == "Bridged Delta",
            "substitution cascaded");
    ++cases;
  }
  require_eq(cases, 1000, "case count");
}

// ---- criterion 8: semantic retriever on the 2D hand fixture ----
void semantic_retriever_sanity() {
  struct StubEmbedder : Gateway {
    std::string name = "stub2d";
    std::string complete(const ChatRequest&) override {
      raise(ErrorCode::unsupported, "not a chat backend");
    }
    std::vector<std::vector<double>> embed(const EmbeddingRequest& req) override {
      std::vector<std::vector<double>> out;
      for (const auto& t : req.texts) {
        double x = 0, y = 0;
        if (t.find("query") != std::string::npos) x = 1;
        else if (t.find("aligned") != std::string::npos) x = 1;
        else if (t.find("orthogonal") != std::string::npos) y = 1;
        else if (t.find("diagonal") != std::string::npos) x = 3, y = 4;
        double norm = std::sqrt(x * x + y * y);
        out.push_back({x / norm, y / norm});
      }
      return out;
    }
    const std::string& profile_name() const override { return name; }
  } gw;

  std::vector<Document> corpus{{"d-orth", "", "orthogonal body"},
                               {"d-align", "", "aligned body"},
                               {"d-diag", "", "diagonal body"}};
  auto r = semantic_retrieve("the query", corpus, 3, gw);
  require(r.doc_ids == std::vector<std::string>({"d-align", "d-diag", "d-orth"}),
          "hand-computed cosine order violated");
  require(std::abs(r.scores[0] - 1.0) < 1e-9, "cos(query, aligned) should be 1.0");
  require(std::abs(r.scores[1] - 0.6) < 1e-9, "cos(query, (3,4)/5) should be 0.6");
  require(std::abs(r.scores[2] - 0.0) < 1e-9, "cos(query, orthogonal) should be 0.0");
}

// ---- criterion 9 (live-optional): audit against a real backend ----
void live_audit() {
  const char* dataset = std::getenv("SEEDFORGE_LIVE_DATASET");
  const char* endpoint = std::getenv("SEEDFORGE_LIVE_ENDPOINT");
  const char* model = std::getenv("SEEDFORGE_LIVE_MODEL");
  const char* auth_env = std::getenv("SEEDFORGE_LIVE_AUTH_ENV");
  require(dataset && endpoint && model && auth_env, "live env vars missing");

  BackendProfile profile;
  profile.name = "live";
  profile.endpoint = endpoint;
  profile.model = model;
  profile.auth_env = auth_env;
  auto gw = make_gateway(profile);

  auto samples = read_samples(dataset);
  require(samples.size() >= 50, "live audit expects >= 50 questions");
  samples.resize(50);
  auto no_ctx = run_condition(samples, {ConditionKind::no_context, "", 0}, {}, *gw,
                              templates());
  auto gold = run_condition(samples, {ConditionKind::gold, "", 0}, {}, *gw, templates());
  auto metrics = compute_metrics(no_ctx, gold, "live", model);
  std::printf("       live leakage error: %.3f\n", metrics.leakage_error);
  require(metrics.leakage_error >= 0.3 && metrics.leakage_error <= 0.7,
          "live leakage error outside the 0.3-0.7 band");
}

}  // namespace

int main() {
  std::printf("seedforge acceptance suite\n");
  criterion("metric-arithmetic", 1.0, metric_arithmetic);
  criterion("isomorphism-oracle", 30.0, isomorphism_oracle);
  criterion("stat-invariance", 0.0, stat_invariance);
  criterion("perturbation-mechanism", 0.0, perturbation_mechanism);
  criterion("leakage-filter-safety", 10.0, leakage_filter_safety);
  criterion("determinism-resumability", 0.0, determinism_resumability);
  criterion("substitution-properties", 0.0, substitution_properties);
  criterion("semantic-retriever", 0.0, semantic_retriever_sanity);

  if (std::getenv("SEEDFORGE_LIVE_AUDIT") != nullptr) {
    criterion("live-audit", 0.0, live_audit);
  } else {
    std::printf("[SKIP] live-audit                   (set SEEDFORGE_LIVE_AUDIT=1 plus "
                "SEEDFORGE_LIVE_{DATASET,ENDPOINT,MODEL,AUTH_ENV} to run; excluded from CI "
                "and not required for acceptance)\n");
  }

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
