#include "seedforge/seedforge_c.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "seedforge/config.hpp"
#include "seedforge/errors.hpp"
#include "seedforge/evaluate.hpp"
#include "seedforge/extraction.hpp"
#include "seedforge/graph.hpp"
#include "seedforge/json_io.hpp"
#include "seedforge/pipeline.hpp"
#include "seedforge/retriever.hpp"
#include "seedforge/templates.hpp"
#include "seedforge/transform.hpp"
#include "seedforge/verify.hpp"

namespace {

using nlohmann::json;
using namespace seedforge;

thread_local std::string t_last_error;

constexpr const char* kVersion = "0.1.0";

sf_status status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return SF_ERR_INVALID_ARGUMENT;
    case ErrorCode::parse: return SF_ERR_PARSE;
    case ErrorCode::io: return SF_ERR_IO;
    case ErrorCode::auth: return SF_ERR_AUTH;
    case ErrorCode::transport: return SF_ERR_TRANSPORT;
    case ErrorCode::script_exhausted: return SF_ERR_SCRIPT_EXHAUSTED;
    case ErrorCode::cassette_miss: return SF_ERR_CASSETTE_MISS;
    case ErrorCode::size_limit: return SF_ERR_SIZE_LIMIT;
    case ErrorCode::empty_evaluation: return SF_ERR_EMPTY_EVALUATION;
    case ErrorCode::proposal_exhausted: return SF_ERR_PROPOSAL_EXHAUSTED;
    case ErrorCode::regeneration_incomplete: return SF_ERR_REGENERATION_INCOMPLETE;
    case ErrorCode::extraction_parse: return SF_ERR_EXTRACTION_PARSE;
    case ErrorCode::unsupported: return SF_ERR_UNSUPPORTED;
    case ErrorCode::internal: return SF_ERR_INTERNAL;
  }
  return SF_ERR_INTERNAL;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
sf_status guarded(Fn&& fn) {
  try {
    t_last_error.clear();
    fn();
    return SF_OK;
  } catch (const Error& e) {
    t_last_error = e.what();
    return status_for(e.code());
  } catch (const json::exception& e) {
    t_last_error = e.what();
    return SF_ERR_PARSE;
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return SF_ERR_INTERNAL;
  }
}

json parse_arg(const char* arg, const char* what) {
  if (arg == nullptr) raise(ErrorCode::invalid_argument, std::string(what) + " is null");
  json j = json::parse(arg, nullptr, false);
  if (j.is_discarded()) raise(ErrorCode::parse, std::string(what) + " is not valid JSON");
  return j;
}

std::string require_cstr(const char* arg, const char* what) {
  if (arg == nullptr || *arg == '\0') {
    raise(ErrorCode::invalid_argument, std::string(what) + " is null or empty");
  }
  return arg;
}

}  // namespace

struct sf_toolkit {
  ToolkitConfig config;
  TemplateStore templates;
  AbstentionDetector abstention;
  std::shared_ptr<CassetteStore> cassette_store;
  // role gateways are shared per toolkit so scripted mocks see one stream
  std::map<std::string, std::shared_ptr<Gateway>> gateway_cache;

  std::shared_ptr<Gateway> wrap_cassette(std::shared_ptr<Gateway> inner) const {
    if (config.cassette.mode == CassetteMode::off) return inner;
    return std::make_shared<CassetteGateway>(config.cassette.mode, cassette_store,
                                             std::move(inner));
  }

  std::shared_ptr<Gateway> gateway_for(const std::string& role) {
    if (auto it = gateway_cache.find(role); it != gateway_cache.end()) return it->second;
    std::shared_ptr<Gateway> gw;
    if (config.cassette.mode == CassetteMode::replay && !config.has_profile(role)) {
      // replay never touches a backend; a missing profile is fine
      gw = wrap_cassette(nullptr);
    } else {
      gw = wrap_cassette(make_gateway(config.profile(role)));
    }
    gateway_cache[role] = gw;
    return gw;
  }

  std::string fallback_role(const std::string& role) const {
    if (config.has_profile(role) || config.cassette.mode == CassetteMode::replay) return role;
    return "generator";
  }

  Backends generation_backends() {
    Backends b;
    b.generator = gateway_for("generator");
    b.verifier_probe = gateway_for(fallback_role("verifier_probe"));
    b.embedder = gateway_for(fallback_role("embedder"));
    return b;
  }

  std::shared_ptr<Gateway> evaluation_gateway() {
    return gateway_for(fallback_role("evaluation"));
  }
};

extern "C" {

const char* sf_version(void) { return kVersion; }

const char* sf_status_name(sf_status status) {
  switch (status) {
    case SF_OK: return "ok";
    case SF_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case SF_ERR_PARSE: return "parse";
    case SF_ERR_IO: return "io";
    case SF_ERR_AUTH: return "auth";
    case SF_ERR_TRANSPORT: return "transport";
    case SF_ERR_SCRIPT_EXHAUSTED: return "script_exhausted";
    case SF_ERR_CASSETTE_MISS: return "cassette_miss";
    case SF_ERR_SIZE_LIMIT: return "size_limit";
    case SF_ERR_EMPTY_EVALUATION: return "empty_evaluation";
    case SF_ERR_PROPOSAL_EXHAUSTED: return "proposal_exhausted";
    case SF_ERR_REGENERATION_INCOMPLETE: return "regeneration_incomplete";
    case SF_ERR_EXTRACTION_PARSE: return "extraction_parse";
    case SF_ERR_UNSUPPORTED: return "unsupported";
    case SF_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* sf_last_error(void) { return t_last_error.c_str(); }

void sf_string_free(char* s) { std::free(s); }

sf_status sf_toolkit_open(const char* config, sf_toolkit** out) {
  return guarded([&] {
    if (out == nullptr) raise(ErrorCode::invalid_argument, "out handle is null");
    auto tk = std::make_unique<sf_toolkit>();
    tk->config = ToolkitConfig::load(require_cstr(config, "config"));
    tk->templates = TemplateStore::load_dir(tk->config.templates_dir);
    if (tk->config.cassette.mode != CassetteMode::off) {
      tk->cassette_store = std::make_shared<CassetteStore>(
          tk->config.cassette.path, tk->config.cassette.mode == CassetteMode::replay);
    }
    std::filesystem::path patterns = tk->config.data_dir / "abstention_patterns.txt";
    if (std::filesystem::exists(patterns)) {
      tk->abstention = AbstentionDetector::load_file(patterns);
    } else {
      tk->abstention = AbstentionDetector::with_patterns(
          {"unknown", "unclear", "cannot determine", "not enough information"});
    }
    *out = tk.release();
  });
}

void sf_toolkit_close(sf_toolkit* toolkit) { delete toolkit; }

sf_status sf_generate(sf_toolkit* toolkit, const char* seeds_path, const char* out_dir,
                      char** summary_json) {
  return guarded([&] {
    if (toolkit == nullptr) raise(ErrorCode::invalid_argument, "toolkit is null");
    auto usage_gen = std::make_shared<GatewayUsage>();
    auto usage_probe = std::make_shared<GatewayUsage>();
    Backends raw = toolkit->generation_backends();
    Backends b;
    b.generator = std::make_shared<InstrumentedGateway>(raw.generator, usage_gen);
    b.verifier_probe = std::make_shared<InstrumentedGateway>(raw.verifier_probe, usage_probe);
    b.embedder = raw.embedder;
    BenchmarkRun run = generate_benchmark(
        require_cstr(seeds_path, "seeds_path"), require_cstr(out_dir, "out_dir"),
        toolkit->config.generation, b, toolkit->templates, usage_gen, usage_probe);
    if (summary_json) {
      json counts = json::object();
      for (const auto& [id, oj] : run.manifest.outcomes) {
        std::string s = oj.value("status", std::string("?"));
        counts[s] = counts.value(s, 0) + 1;
      }
      *summary_json = dup_string(json{{"n_seeds", run.manifest.seed_order.size()},
                                      {"n_accepted", run.accepted.size()},
                                      {"status_counts", counts},
                                      {"out_dir", out_dir}}
                                     .dump());
    }
  });
}

sf_status sf_resume(sf_toolkit* toolkit, const char* seeds_path, const char* out_dir,
                    char** summary_json) {
  // generation is manifest-driven, so resume is a rerun over the same dir
  return sf_generate(toolkit, seeds_path, out_dir, summary_json);
}

sf_status sf_regenerate(sf_toolkit* toolkit, const char* seeds_path, const char* out_dir,
                        const int64_t* run_seeds, size_t n_runs, char** summary_json) {
  return guarded([&] {
    if (toolkit == nullptr) raise(ErrorCode::invalid_argument, "toolkit is null");
    if (run_seeds == nullptr || n_runs == 0) {
      raise(ErrorCode::invalid_argument, "run_seeds is empty");
    }
    std::vector<std::int64_t> seeds(run_seeds, run_seeds + n_runs);
    auto runs = regenerate(require_cstr(seeds_path, "seeds_path"),
                           require_cstr(out_dir, "out_dir"), toolkit->config.generation,
                           seeds, toolkit->generation_backends(), toolkit->templates);
    if (summary_json) {
      json rows = json::array();
      for (std::size_t i = 0; i < runs.size(); ++i) {
        rows.push_back(json{{"run_index", i}, {"n_accepted", runs[i].accepted.size()}});
      }
      *summary_json = dup_string(json{{"runs", rows}}.dump());
    }
  });
}

sf_status sf_perturb(sf_toolkit* toolkit, const char* seeds_path, int shift,
                     const char* out_dir, char** summary_json) {
  if (toolkit == nullptr) {
    t_last_error = "toolkit is null";
    return SF_ERR_INVALID_ARGUMENT;
  }
  if (shift < 0) {
    t_last_error = "shift must be >= 0";
    return SF_ERR_INVALID_ARGUMENT;
  }
  sf_toolkit study = *toolkit;  // shares gateways and cassette store
  study.config.generation.perturbation_shift = shift;
  study.config.generation.context_path = ContextPath::triplet_regeneration;
  return sf_generate(&study, seeds_path, out_dir, summary_json);
}

sf_status sf_audit(sf_toolkit* toolkit, const char* dataset_path, const char* dataset_id,
                   char** report_json) {
  return guarded([&] {
    if (toolkit == nullptr) raise(ErrorCode::invalid_argument, "toolkit is null");
    std::vector<Sample> samples = read_samples(require_cstr(dataset_path, "dataset_path"));
    if (samples.empty()) raise(ErrorCode::empty_evaluation, "dataset is empty");
    auto gateway = toolkit->evaluation_gateway();

    EvalOptions opts;
    opts.temperature = toolkit->config.evaluation.temperature;
    opts.workers = toolkit->config.evaluation.workers;
    opts.max_output_tokens = toolkit->config.evaluation.max_output_tokens;

    Condition no_ctx{ConditionKind::no_context, "", 0};
    Condition gold{ConditionKind::gold, "", 0};
    auto records_no_ctx =
        run_condition(samples, no_ctx, {}, *gateway, toolkit->templates, nullptr, opts);
    auto records_gold =
        run_condition(samples, gold, {}, *gateway, toolkit->templates, nullptr, opts);

    // three-way quality classification of the no-context responses
    json class_counts{{"leak", 0}, {"factual_inconsistency", 0}, {"non_leaking", 0},
                      {"unresolved", 0}};
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (records_no_ctx[i].errored) {
        class_counts["unresolved"] = class_counts["unresolved"].get<int>() + 1;
        continue;
      }
      std::string context_text;
      for (const auto& d : samples[i].gold_documents()) {
        context_text += d.body;
        context_text += "\n";
      }
      try {
        QualityClass qc = classify_quality(
            samples[i].question, samples[i].answer, context_text,
            records_no_ctx[i].model_response, *gateway, toolkit->templates,
            toolkit->abstention, samples[i].choices);
        records_no_ctx[i].quality_class = qc.kind;
        std::string name = quality_class_name(qc.kind);
        class_counts[name] = class_counts[name].get<int>() + 1;
      } catch (const Error&) {
        class_counts["unresolved"] = class_counts["unresolved"].get<int>() + 1;
      }
    }

    std::string model_id = toolkit->config.has_profile("evaluation")
                               ? toolkit->config.profile("evaluation").model
                               : std::string();
    BenchmarkMetrics metrics =
        compute_metrics(records_no_ctx, records_gold,
                        require_cstr(dataset_id, "dataset_id"), model_id);

    json recs = json::array();
    for (const auto& r : records_no_ctx) recs.push_back(to_json(r));
    json report{{"metrics", to_json(metrics)},
                {"quality_classes", class_counts},
                {"no_context_records", recs}};
    if (report_json) *report_json = dup_string(report.dump());
  });
}

sf_status sf_evaluate(sf_toolkit* toolkit, const char* benchmark_path,
                      const char* dataset_id, char** report_json) {
  return guarded([&] {
    if (toolkit == nullptr) raise(ErrorCode::invalid_argument, "toolkit is null");
    std::string path = require_cstr(benchmark_path, "benchmark_path");

    // accept generated benchmarks and plain sample files
    std::vector<Sample> samples;
    {
      auto rows = read_jsonl(path);
      if (rows.empty()) raise(ErrorCode::empty_evaluation, "benchmark is empty");
      for (const auto& row : rows) {
        if (row.contains("seed_id") && row.contains("sample")) {
          samples.push_back(generated_sample_from_json(row).sample);
        } else {
          samples.push_back(sample_from_json(row));
        }
      }
    }
    // retriever corpus: pooled contexts of the whole benchmark, deduplicated
    // by content; ids namespaced per sample to avoid collisions
    std::vector<Document> corpus;
    std::set<std::string> seen_content;
    for (const auto& s : samples) {
      for (const auto& doc : s.contexts) {
        std::string content_key = doc.title + "\x1f" + doc.body;
        if (!seen_content.insert(content_key).second) continue;
        Document d = doc;
        d.doc_id = s.id + "/" + doc.doc_id;
        corpus.push_back(std::move(d));
      }
    }

    auto gateway = toolkit->evaluation_gateway();
    const EvaluationConfig& ec = toolkit->config.evaluation;
    EvalOptions opts;
    opts.temperature = ec.temperature;
    opts.workers = ec.workers;
    opts.max_output_tokens = ec.max_output_tokens;

    // corpus file for external adapters, next to the benchmark
    std::filesystem::path benchmark_file(path);
    std::filesystem::path corpus_path =
        benchmark_file.parent_path() /
        (benchmark_file.stem().string() + ".corpus.jsonl");
    {
      std::vector<json> rows;
      for (const auto& d : corpus) rows.push_back(to_json(d));
      write_jsonl(corpus_path, rows);
    }

    std::vector<EvalRecord> records_no_ctx, records_gold;
    std::vector<std::pair<std::string, double>> condition_accuracy;
    auto accuracy_of = [](const std::vector<EvalRecord>& records) {
      int correct = 0, scored = 0;
      for (const auto& r : records) {
        if (r.errored) continue;
        ++scored;
        if (r.correct) ++correct;
      }
      return scored ? static_cast<double>(correct) / scored : 0.0;
    };

    for (const auto& cond_name : ec.conditions) {
      if (cond_name == "no_context") {
        records_no_ctx = run_condition(samples, {ConditionKind::no_context, "", 0}, {},
                                       *gateway, toolkit->templates, nullptr, opts);
        condition_accuracy.emplace_back("no_context", accuracy_of(records_no_ctx));
      } else if (cond_name == "gold") {
        records_gold = run_condition(samples, {ConditionKind::gold, "", 0}, {}, *gateway,
                                     toolkit->templates, nullptr, opts);
        condition_accuracy.emplace_back("gold", accuracy_of(records_gold));
      } else {
        std::unique_ptr<Retriever> retriever;
        if (cond_name == "semantic") {
          std::shared_ptr<Gateway> embedder =
              toolkit->config.has_profile("embedder") ||
                      toolkit->config.cassette.mode == CassetteMode::replay
                  ? toolkit->gateway_for("embedder")
                  : gateway;
          retriever = std::make_unique<SemanticRetriever>(corpus, embedder);
        } else {
          const ExternalRetrieverConfig* found = nullptr;
          for (const auto& r : ec.external_retrievers) {
            if (r.name == cond_name) found = &r;
          }
          if (!found) {
            raise(ErrorCode::invalid_argument,
                  "condition '" + cond_name + "' is neither built-in nor configured");
          }
          if (found->kind == "stdio") {
            retriever = std::make_unique<StdioRetriever>(found->name, found->command,
                                                         corpus_path);
          } else {
            retriever = std::make_unique<HttpRetriever>(found->name, found->endpoint);
          }
        }
        int top_k = std::min<int>(ec.top_k, static_cast<int>(corpus.size()));
        Condition cond{ConditionKind::retriever, cond_name, top_k};
        auto records = run_condition(samples, cond, corpus, *gateway, toolkit->templates,
                                     retriever.get(), opts);
        condition_accuracy.emplace_back(cond_name, accuracy_of(records));
      }
    }

    json report = json::object();
    report["dataset_id"] = require_cstr(dataset_id, "dataset_id");
    report["corpus"] = "pooled";  // all benchmark contexts form one index
    report["n_questions"] = samples.size();
    json cond = json::object();
    for (const auto& [name, acc] : condition_accuracy) cond[name] = acc;
    report["condition_accuracy"] = cond;
    if (!records_no_ctx.empty() && !records_gold.empty()) {
      std::string model_id = toolkit->config.has_profile("evaluation")
                                 ? toolkit->config.profile("evaluation").model
                                 : std::string();
      report["metrics"] =
          to_json(compute_metrics(records_no_ctx, records_gold, dataset_id, model_id));
    }
    if (report_json) *report_json = dup_string(report.dump());
  });
}

sf_status sf_dataset_stats(sf_toolkit* toolkit, const char* benchmark_path,
                           char** stats_json) {
  return guarded([&] {
    if (toolkit == nullptr) raise(ErrorCode::invalid_argument, "toolkit is null");
    auto generated = read_generated(require_cstr(benchmark_path, "benchmark_path"));
    if (generated.empty()) raise(ErrorCode::empty_evaluation, "no generated records");
    json rows = json::array();
    double sums[2][4] = {{0}};
    for (const auto& g : generated) {
      GraphStats qs = graph_stats(g.question_graph);
      GraphStats cs = graph_stats(g.context_graph);
      rows.push_back(json{{"seed_id", g.seed_id},
                          {"question_graph",
                           json{{"n_nodes", qs.n_nodes},
                                {"n_edges", qs.n_edges},
                                {"density", qs.density},
                                {"avg_degree", qs.avg_degree}}},
                          {"context_graph",
                           json{{"n_nodes", cs.n_nodes},
                                {"n_edges", cs.n_edges},
                                {"density", cs.density},
                                {"avg_degree", cs.avg_degree}}}});
      sums[0][0] += qs.n_nodes; sums[0][1] += qs.n_edges;
      sums[0][2] += qs.density; sums[0][3] += qs.avg_degree;
      sums[1][0] += cs.n_nodes; sums[1][1] += cs.n_edges;
      sums[1][2] += cs.density; sums[1][3] += cs.avg_degree;
    }
    double n = static_cast<double>(generated.size());
    auto means = [&](int k) {
      return json{{"n_nodes", sums[k][0] / n},
                  {"n_edges", sums[k][1] / n},
                  {"density", sums[k][2] / n},
                  {"avg_degree", sums[k][3] / n}};
    };
    json report{{"per_sample", rows},
                {"aggregate", json{{"question_graph", means(0)},
                                   {"context_graph", means(1)},
                                   {"n_samples", generated.size()}}}};
    if (stats_json) *stats_json = dup_string(report.dump());
  });
}

sf_status sf_import_dataset(const char* scheme, const char* input_path,
                            const char* output_path, char** summary_json) {
  return guarded([&] {
    auto samples = import_dataset(require_cstr(scheme, "scheme"),
                                  require_cstr(input_path, "input_path"));
    int invalid = 0;
    for (const auto& s : samples) {
      if (!validate_sample(s).empty()) ++invalid;
    }
    write_samples(require_cstr(output_path, "output_path"), samples);
    if (summary_json) {
      *summary_json = dup_string(
          json{{"n_samples", samples.size()}, {"n_invalid", invalid}}.dump());
    }
  });
}

sf_status sf_validate_sample(const char* sample_json, char** violations_json) {
  return guarded([&] {
    Sample s = sample_from_json(parse_arg(sample_json, "sample_json"));
    json arr = json::array();
    for (const auto& v : validate_sample(s)) {
      arr.push_back(json{{"field", v.field}, {"rule", v.rule}});
    }
    if (violations_json) *violations_json = dup_string(arr.dump());
  });
}

sf_status sf_graph_stats(const char* graph_json, char** stats_json) {
  return guarded([&] {
    ReasoningGraph g = graph_from_json(parse_arg(graph_json, "graph_json"));
    GraphStats s = graph_stats(g);
    if (stats_json) {
      *stats_json = dup_string(json{{"n_nodes", s.n_nodes},
                                    {"n_edges", s.n_edges},
                                    {"density", s.density},
                                    {"avg_degree", s.avg_degree}}
                                   .dump());
    }
  });
}

sf_status sf_graphs_equivalent(const char* graph1_json, const char* graph2_json,
                               int strict, char** report_json) {
  return guarded([&] {
    ReasoningGraph g1 = graph_from_json(parse_arg(graph1_json, "graph1_json"));
    ReasoningGraph g2 = graph_from_json(parse_arg(graph2_json, "graph2_json"));
    EquivalenceReport r = structurally_equivalent(
        g1, g2, strict ? EquivalenceMode::strict : EquivalenceMode::relaxed);
    json j{{"equivalent", r.equivalent}};
    if (r.witness) {
      json w = json::array();
      for (const auto& [a, b] : *r.witness) w.push_back(json{{"from", a}, {"to", b}});
      j["witness"] = w;
    }
    if (r.failure_reason) j["failure_reason"] = equivalence_failure_name(*r.failure_reason);
    if (report_json) *report_json = dup_string(j.dump());
  });
}

sf_status sf_cyclic_perturbation(const char* triplets_json, int shift,
                                 char** out_triplets_json) {
  return guarded([&] {
    auto triplets = triplets_from_json(parse_arg(triplets_json, "triplets_json"));
    auto out = cyclic_perturbation(triplets, shift);
    if (out_triplets_json) *out_triplets_json = dup_string(triplets_to_json(out).dump());
  });
}

sf_status sf_apply_mapping(const char* sample_json, const char* mapping_json,
                           char** out_sample_json) {
  return guarded([&] {
    Sample s = sample_from_json(parse_arg(sample_json, "sample_json"));
    EntityMapping m = mapping_from_json(parse_arg(mapping_json, "mapping_json"));
    Sample out = apply_mapping(s, m);
    if (out_sample_json) *out_sample_json = dup_string(to_json(out).dump());
  });
}

sf_status sf_answer_contains(const char* response, const char* answer,
                             const char* choices_json, int* out_contains) {
  return guarded([&] {
    if (response == nullptr || answer == nullptr) {
      raise(ErrorCode::invalid_argument, "response/answer is null");
    }
    std::optional<std::vector<std::string>> choices;
    if (choices_json != nullptr && *choices_json != '\0') {
      choices = parse_arg(choices_json, "choices_json").get<std::vector<std::string>>();
    }
    bool hit = answer_contains(response, answer, choices);
    if (out_contains) *out_contains = hit ? 1 : 0;
  });
}

sf_status sf_compute_metrics(const char* no_ctx_records_json, const char* gold_records_json,
                             const char* dataset_id, const char* model_id,
                             char** metrics_json) {
  return guarded([&] {
    std::vector<EvalRecord> no_ctx, gold;
    for (const auto& rj : parse_arg(no_ctx_records_json, "no_ctx_records_json")) {
      no_ctx.push_back(eval_record_from_json(rj));
    }
    for (const auto& rj : parse_arg(gold_records_json, "gold_records_json")) {
      gold.push_back(eval_record_from_json(rj));
    }
    BenchmarkMetrics m = compute_metrics(no_ctx, gold, dataset_id ? dataset_id : "",
                                         model_id ? model_id : "");
    if (metrics_json) *metrics_json = dup_string(to_json(m).dump());
  });
}

sf_status sf_compare_reports(const char* reports_json_array, char** report_json) {
  return guarded([&] {
    json reports = parse_arg(reports_json_array, "reports_json_array");
    if (!reports.is_array() || reports.size() < 2) {
      raise(ErrorCode::invalid_argument, "need >= 2 evaluation reports to compare");
    }
    std::vector<VariantEvaluation> variants;
    for (const auto& rj : reports) {
      VariantEvaluation v;
      v.variant = rj.value("variant", rj.value("dataset_id", std::string("?")));
      if (rj.contains("metrics")) v.metrics = metrics_from_json(rj.at("metrics"));
      v.metrics.dataset_id = rj.value("dataset_id", v.metrics.dataset_id);
      if (rj.contains("condition_accuracy")) {
        for (auto it = rj.at("condition_accuracy").begin();
             it != rj.at("condition_accuracy").end(); ++it) {
          v.condition_accuracy.emplace_back(it.key(), it.value().get<double>());
        }
      }
      variants.push_back(std::move(v));
    }
    ComparisonReport report = compare_benchmarks(variants);
    if (report_json) *report_json = dup_string(to_json(report).dump());
  });
}

sf_status sf_report_to_csv(const char* report_json, char** csv_out) {
  return guarded([&] {
    ComparisonReport report = comparison_from_json(parse_arg(report_json, "report_json"));
    if (csv_out) *csv_out = dup_string(comparison_to_csv(report));
  });
}

}  // extern "C"
