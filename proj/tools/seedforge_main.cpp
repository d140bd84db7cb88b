// seedforge CLI: drives the shared library through the C API.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "seedforge/seedforge_c.h"

namespace {

using nlohmann::json;

struct StringGuard {
  char* value = nullptr;
  ~StringGuard() { sf_string_free(value); }
};

struct ToolkitGuard {
  sf_toolkit* handle = nullptr;
  ~ToolkitGuard() { sf_toolkit_close(handle); }
};

int fail(sf_status rc, const std::string& what) {
  std::cerr << "error: " << what << ": [" << sf_status_name(rc) << "] "
            << sf_last_error() << "\n";
  return 1;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open " << path << "\n";
    std::exit(1);
  }
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    std::exit(1);
  }
  out << content;
}

// Config precedence: file (if given) < flag overrides.
struct ConfigBuilder {
  std::string config_path;
  std::optional<std::string> templates_dir;
  std::optional<std::string> cassette_mode;
  std::optional<std::string> cassette_path;
  std::optional<long long> run_seed;
  std::optional<int> workers;
  std::optional<int> n_probes;
  std::optional<int> max_attempts;
  std::optional<std::string> context_path;
  std::optional<std::string> equivalence;
  std::optional<int> top_k;
  std::optional<std::string> conditions;

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "config JSON file");
    cmd->add_option("--templates", templates_dir, "prompt template directory");
    cmd->add_option("--cassette-mode", cassette_mode, "off|record|replay");
    cmd->add_option("--cassette", cassette_path, "cassette JSONL path");
    cmd->add_option("--run-seed", run_seed, "run-level determinism seed");
    cmd->add_option("--workers", workers, "worker pool size");
    cmd->add_option("--n-probes", n_probes, "leakage probes per candidate");
    cmd->add_option("--max-attempts", max_attempts, "generation attempts per seed");
    cmd->add_option("--context-path", context_path,
                    "surface_substitution|triplet_regeneration");
    cmd->add_option("--equivalence", equivalence, "strict|relaxed");
    cmd->add_option("--top-k", top_k, "retrieval depth");
    cmd->add_option("--conditions", conditions,
                    "comma-separated evaluation conditions");
  }

  std::string build() const {
    json j = json::object();
    if (!config_path.empty()) {
      j = json::parse(read_file(config_path), nullptr, false);
      if (j.is_discarded()) {
        std::cerr << "error: config is not valid JSON: " << config_path << "\n";
        std::exit(1);
      }
      // resolve paths the same way the library would, relative to the file
      std::filesystem::path base =
          std::filesystem::absolute(config_path).parent_path();
      for (const char* key : {"templates_dir", "data_dir"}) {
        std::filesystem::path p = j.value(key, std::string(key == std::string("data_dir")
                                                               ? "data"
                                                               : "templates"));
        if (p.is_relative()) j[key] = (base / p).string();
      }
      if (j.contains("cassette") && j["cassette"].contains("path")) {
        std::filesystem::path p = j["cassette"]["path"].get<std::string>();
        if (p.is_relative()) j["cassette"]["path"] = (base / p).string();
      }
      if (j.contains("profiles")) {
        for (auto& [role, pj] : j["profiles"].items()) {
          if (pj.contains("script")) {
            std::filesystem::path p = pj["script"].get<std::string>();
            if (!p.empty() && p.is_relative()) pj["script"] = (base / p).string();
          }
        }
      }
    }
    if (templates_dir) j["templates_dir"] = *templates_dir;
    if (cassette_mode) j["cassette"]["mode"] = *cassette_mode;
    if (cassette_path) j["cassette"]["path"] = *cassette_path;
    if (run_seed) j["generation"]["run_seed"] = *run_seed;
    if (workers) {
      j["generation"]["workers"] = *workers;
      j["evaluation"]["workers"] = *workers;
    }
    if (n_probes) j["generation"]["n_probes"] = *n_probes;
    if (max_attempts) j["generation"]["max_attempts"] = *max_attempts;
    if (context_path) j["generation"]["context_path"] = *context_path;
    if (equivalence) j["generation"]["equivalence_mode"] = *equivalence;
    if (top_k) j["evaluation"]["top_k"] = *top_k;
    if (conditions) {
      json arr = json::array();
      std::stringstream ss(*conditions);
      std::string part;
      while (std::getline(ss, part, ',')) {
        if (!part.empty()) arr.push_back(part);
      }
      j["evaluation"]["conditions"] = arr;
    }
    return j.dump();
  }
};

int open_toolkit(const ConfigBuilder& cfg, ToolkitGuard& tk) {
  sf_status rc = sf_toolkit_open(cfg.build().c_str(), &tk.handle);
  if (rc != SF_OK) return fail(rc, "opening toolkit");
  return 0;
}

void print_summary(const char* label, const StringGuard& s) {
  json j = json::parse(s.value ? s.value : "{}", nullptr, false);
  std::cout << label << ": "
            << (j.is_discarded() ? std::string(s.value ? s.value : "") : j.dump(2)) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"seedforge: retrieval-dependent benchmark generation and auditing"};
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand("generate", "transform seeds into a fresh benchmark");
  ConfigBuilder gen_cfg;
  std::string seeds_path, out_dir;
  gen_cfg.add_flags(generate);
  generate->add_option("--seeds", seeds_path, "seed samples JSONL")->required();
  generate->add_option("--out", out_dir, "output directory")->required();

  // resume
  auto* resume = app.add_subcommand("resume", "continue an interrupted generate run");
  ConfigBuilder res_cfg;
  std::string res_seeds, res_out;
  res_cfg.add_flags(resume);
  resume->add_option("--seeds", res_seeds, "seed samples JSONL")->required();
  resume->add_option("--out", res_out, "output directory of the interrupted run")->required();

  // regenerate
  auto* regen = app.add_subcommand("regenerate", "repeated generation under distinct run seeds");
  ConfigBuilder regen_cfg;
  std::string regen_seeds, regen_out;
  std::vector<long long> regen_run_seeds;
  regen_cfg.add_flags(regen);
  regen->add_option("--seeds", regen_seeds, "seed samples JSONL")->required();
  regen->add_option("--out", regen_out, "output directory")->required();
  regen->add_option("--run-seeds", regen_run_seeds, "one run per seed value")->required();

  // audit
  auto* audit = app.add_subcommand("audit", "leakage/answerability audit of a QA dataset");
  ConfigBuilder audit_cfg;
  std::string audit_dataset, audit_id = "dataset", audit_out;
  audit_cfg.add_flags(audit);
  audit->add_option("--dataset", audit_dataset, "samples JSONL")->required();
  audit->add_option("--dataset-id", audit_id, "dataset label for the report");
  audit->add_option("--out", audit_out, "report JSON path");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "run QA conditions over a benchmark");
  ConfigBuilder eval_cfg;
  std::string eval_benchmark, eval_id = "benchmark", eval_out;
  std::vector<std::string> compare_reports;
  eval_cfg.add_flags(evaluate);
  evaluate->add_option("--benchmark", eval_benchmark, "benchmark JSONL");
  evaluate->add_option("--dataset-id", eval_id, "dataset label for the report");
  evaluate->add_option("--out", eval_out, "report JSON path (CSV written alongside)");
  evaluate->add_option("--compare", compare_reports,
                       "2+ evaluation report JSON files to merge into a comparison table");

  // perturb
  auto* perturb = app.add_subcommand("perturb", "structure-perturbation study mode");
  ConfigBuilder pert_cfg;
  std::string pert_seeds, pert_out;
  int pert_shift = 1;
  pert_cfg.add_flags(perturb);
  perturb->add_option("--seeds", pert_seeds, "seed samples JSONL")->required();
  perturb->add_option("--out", pert_out, "output directory")->required();
  perturb->add_option("--shift", pert_shift, "cyclic shift k");

  // stats
  auto* stats = app.add_subcommand("stats", "graph statistics of a generated benchmark");
  ConfigBuilder stats_cfg;
  std::string stats_benchmark, stats_out;
  stats_cfg.add_flags(stats);
  stats->add_option("--benchmark", stats_benchmark, "generated benchmark JSONL")->required();
  stats->add_option("--out", stats_out, "stats JSON path");

  // import
  auto* import_cmd = app.add_subcommand("import", "normalize a native dataset to samples JSONL");
  std::string import_scheme, import_in, import_out;
  import_cmd->add_option("--scheme", import_scheme,
                         "hotpotqa|2wikimultihopqa|wikihop|qasc|jsonl")->required();
  import_cmd->add_option("--in", import_in, "native dataset file")->required();
  import_cmd->add_option("--out", import_out, "output samples JSONL")->required();

  CLI11_PARSE(app, argc, argv);

  if (generate->parsed() || resume->parsed()) {
    const bool resuming = resume->parsed();
    ToolkitGuard tk;
    if (int rc = open_toolkit(resuming ? res_cfg : gen_cfg, tk)) return rc;
    StringGuard summary;
    sf_status rc = resuming
                       ? sf_resume(tk.handle, res_seeds.c_str(), res_out.c_str(), &summary.value)
                       : sf_generate(tk.handle, seeds_path.c_str(), out_dir.c_str(),
                                     &summary.value);
    if (rc != SF_OK) return fail(rc, resuming ? "resume" : "generate");
    print_summary(resuming ? "resume" : "generate", summary);
    return 0;
  }
  if (regen->parsed()) {
    ToolkitGuard tk;
    if (int rc = open_toolkit(regen_cfg, tk)) return rc;
    std::vector<int64_t> seeds(regen_run_seeds.begin(), regen_run_seeds.end());
    StringGuard summary;
    sf_status rc = sf_regenerate(tk.handle, regen_seeds.c_str(), regen_out.c_str(),
                                 seeds.data(), seeds.size(), &summary.value);
    if (rc != SF_OK) return fail(rc, "regenerate");
    print_summary("regenerate", summary);
    return 0;
  }
  if (audit->parsed()) {
    ToolkitGuard tk;
    if (int rc = open_toolkit(audit_cfg, tk)) return rc;
    StringGuard report;
    sf_status rc = sf_audit(tk.handle, audit_dataset.c_str(), audit_id.c_str(), &report.value);
    if (rc != SF_OK) return fail(rc, "audit");
    if (!audit_out.empty()) {
      write_file(audit_out, report.value);
      std::cout << "audit report written to " << audit_out << "\n";
    }
    json j = json::parse(report.value, nullptr, false);
    if (!j.is_discarded()) {
      std::cout << "metrics: " << j["metrics"].dump(2) << "\n"
                << "quality_classes: " << j["quality_classes"].dump(2) << "\n";
    }
    return 0;
  }
  if (evaluate->parsed()) {
    if (!compare_reports.empty()) {
      if (compare_reports.size() < 2) {
        std::cerr << "error: --compare needs at least two report files\n";
        return 1;
      }
      json arr = json::array();
      for (const auto& path : compare_reports) {
        json j = json::parse(read_file(path), nullptr, false);
        if (j.is_discarded()) {
          std::cerr << "error: not valid JSON: " << path << "\n";
          return 1;
        }
        if (!j.contains("variant")) j["variant"] = path;
        arr.push_back(j);
      }
      StringGuard report;
      sf_status rc = sf_compare_reports(arr.dump().c_str(), &report.value);
      if (rc != SF_OK) return fail(rc, "compare");
      StringGuard csv;
      rc = sf_report_to_csv(report.value, &csv.value);
      if (rc != SF_OK) return fail(rc, "compare csv");
      if (!eval_out.empty()) {
        write_file(eval_out, report.value);
        std::string csv_path = eval_out + ".csv";
        write_file(csv_path, csv.value);
        std::cout << "comparison written to " << eval_out << " and " << csv_path << "\n";
      } else {
        std::cout << csv.value;
      }
      return 0;
    }
    if (eval_benchmark.empty()) {
      std::cerr << "error: --benchmark (or --compare) is required\n";
      return 1;
    }
    ToolkitGuard tk;
    if (int rc = open_toolkit(eval_cfg, tk)) return rc;
    StringGuard report;
    sf_status rc =
        sf_evaluate(tk.handle, eval_benchmark.c_str(), eval_id.c_str(), &report.value);
    if (rc != SF_OK) return fail(rc, "evaluate");
    if (!eval_out.empty()) {
      write_file(eval_out, report.value);
      std::cout << "evaluation report written to " << eval_out << "\n";
    }
    print_summary("evaluate", report);
    return 0;
  }
  if (perturb->parsed()) {
    ToolkitGuard tk;
    if (int rc = open_toolkit(pert_cfg, tk)) return rc;
    StringGuard summary;
    sf_status rc = sf_perturb(tk.handle, pert_seeds.c_str(), pert_shift, pert_out.c_str(),
                              &summary.value);
    if (rc != SF_OK) return fail(rc, "perturb");
    print_summary("perturb", summary);
    return 0;
  }
  if (stats->parsed()) {
    ToolkitGuard tk;
    if (int rc = open_toolkit(stats_cfg, tk)) return rc;
    StringGuard report;
    sf_status rc = sf_dataset_stats(tk.handle, stats_benchmark.c_str(), &report.value);
    if (rc != SF_OK) return fail(rc, "stats");
    if (!stats_out.empty()) {
      write_file(stats_out, report.value);
      std::cout << "stats written to " << stats_out << "\n";
    } else {
      print_summary("stats", report);
    }
    return 0;
  }
  if (import_cmd->parsed()) {
    StringGuard summary;
    sf_status rc = sf_import_dataset(import_scheme.c_str(), import_in.c_str(),
                                     import_out.c_str(), &summary.value);
    if (rc != SF_OK) return fail(rc, "import");
    print_summary("import", summary);
    return 0;
  }
  return 0;
}
