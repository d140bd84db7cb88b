#include "seedforge/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "seedforge/log.hpp"
#include "seedforge/text.hpp"

namespace seedforge {

namespace {

using nlohmann::json;

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  if (workers <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex err_mu;
  for (std::size_t t = 0; t < n_threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(err_mu);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string render_documents(const std::vector<Document>& docs) {
  std::ostringstream out;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (i > 0) out << "\n\n";
    if (!docs[i].title.empty()) out << "[" << docs[i].title << "]\n";
    out << docs[i].body;
  }
  return out.str();
}

std::string choices_block_for(const Sample& s) {
  if (!s.choices || s.choices->empty()) return "";
  std::string block = "\nCHOICES:\n";
  for (std::size_t i = 0; i < s.choices->size(); ++i) {
    block += "(";
    block += static_cast<char>('A' + i);
    block += ") " + (*s.choices)[i] + "\n";
  }
  return block;
}

}  // namespace

std::vector<EvalRecord> run_condition(const std::vector<Sample>& samples,
                                      const Condition& condition,
                                      const std::vector<Document>& corpus,
                                      Gateway& gateway, const TemplateStore& templates,
                                      Retriever* retriever, const EvalOptions& options) {
  if (condition.kind == ConditionKind::retriever) {
    if (retriever == nullptr) {
      raise(ErrorCode::invalid_argument, "retriever condition without a retriever");
    }
    if (corpus.empty()) {
      raise(ErrorCode::invalid_argument, "retriever condition with empty corpus");
    }
  }
  if (condition.kind == ConditionKind::gold) {
    for (const auto& s : samples) {
      if (s.supporting_ids) {
        for (const auto& id : *s.supporting_ids) {
          bool found = false;
          for (const auto& d : s.contexts) found = found || d.doc_id == id;
          if (!found) {
            raise(ErrorCode::invalid_argument,
                  "gold condition: sample '" + s.id + "' has dangling supporting_id " + id);
          }
        }
      }
    }
  }

  AnswerMatcher match = options.matcher;
  if (!match) {
    match = [](const std::string& r, const std::string& a,
               const std::optional<std::vector<std::string>>& c) {
      return answer_contains(r, a, c);
    };
  }

  std::vector<EvalRecord> records(samples.size());
  parallel_for(samples.size(), options.workers, [&](std::size_t i) {
    const Sample& s = samples[i];
    EvalRecord rec;
    rec.sample_id = s.id;
    rec.condition = condition.kind;
    if (condition.kind == ConditionKind::retriever) rec.retriever_name = condition.retriever_name;
    try {
      std::string prompt;
      if (condition.kind == ConditionKind::no_context) {
        prompt = templates.render("no_context_probe", {{"question", s.question},
                                                       {"choices_block", choices_block_for(s)}});
      } else {
        std::vector<Document> docs;
        if (condition.kind == ConditionKind::gold) {
          docs = s.gold_documents();
        } else {
          RetrievedSet hits = retriever->retrieve(s.question, condition.top_k);
          for (const auto& id : hits.doc_ids) {
            for (const auto& d : corpus) {
              if (d.doc_id == id) {
                docs.push_back(d);
                break;
              }
            }
          }
        }
        prompt = templates.render("qa_with_context",
                                  {{"question", s.question},
                                   {"context", render_documents(docs)},
                                   {"choices_block", choices_block_for(s)}});
      }
      ChatRequest req;
      req.user_prompt = prompt;
      req.temperature = options.temperature;
      req.max_output_tokens = options.max_output_tokens;
      rec.model_response = gateway.complete(req);
      rec.correct = match(rec.model_response, s.answer, s.choices);
    } catch (const Error& e) {
      rec.errored = true;
      rec.error_reason = std::string(error_code_name(e.code())) + ": " + e.what();
      log::warn("evaluation error on sample '" + s.id + "': " + rec.error_reason);
    }
    records[i] = std::move(rec);
  });
  return records;
}

BenchmarkMetrics compute_metrics(const std::vector<EvalRecord>& records_no_ctx,
                                 const std::vector<EvalRecord>& records_gold,
                                 const std::string& dataset_id,
                                 const std::string& model_id) {
  if (records_no_ctx.empty() || records_gold.empty()) {
    raise(ErrorCode::empty_evaluation, "compute_metrics: empty record list");
  }
  std::set<std::string> ids_no_ctx, ids_gold;
  for (const auto& r : records_no_ctx) ids_no_ctx.insert(r.sample_id);
  for (const auto& r : records_gold) ids_gold.insert(r.sample_id);
  std::vector<std::string> common;
  std::set_intersection(ids_no_ctx.begin(), ids_no_ctx.end(), ids_gold.begin(),
                        ids_gold.end(), std::back_inserter(common));
  if (common.empty()) {
    raise(ErrorCode::empty_evaluation, "compute_metrics: disjoint sample id sets");
  }
  if (ids_no_ctx != ids_gold) {
    raise(ErrorCode::invalid_argument, "compute_metrics: sample id sets differ");
  }

  auto accuracy = [](const std::vector<EvalRecord>& records) {
    int correct = 0, scored = 0;
    for (const auto& r : records) {
      if (r.errored) continue;  // transport noise must not masquerade as ability
      ++scored;
      if (r.correct) ++correct;
    }
    if (scored == 0) raise(ErrorCode::empty_evaluation, "all records errored");
    return static_cast<double>(correct) / scored;
  };

  return make_metrics(dataset_id, model_id, accuracy(records_no_ctx),
                      accuracy(records_gold), static_cast<int>(common.size()));
}

ComparisonReport compare_benchmarks(const std::vector<VariantEvaluation>& variants) {
  ComparisonReport report;
  for (const auto& v : variants) {
    ComparisonRow row;
    row.variant = v.variant;
    row.dataset_id = v.metrics.dataset_id;
    row.model_id = v.metrics.model_id;
    row.leakage_error = v.metrics.leakage_error;
    row.answerability_accuracy = v.metrics.answerability_accuracy;
    row.condition_accuracy = v.condition_accuracy;
    double lo = 0.0, hi = 0.0;
    int n_retrievers = 0;
    for (const auto& [name, acc] : v.condition_accuracy) {
      if (name == "no_context" || name == "gold") continue;
      if (n_retrievers == 0) {
        lo = hi = acc;
      } else {
        lo = std::min(lo, acc);
        hi = std::max(hi, acc);
      }
      ++n_retrievers;
    }
    row.retriever_spread = n_retrievers >= 2 ? hi - lo : 0.0;
    report.rows.push_back(std::move(row));
  }
  return report;
}

json to_json(const ComparisonReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    json cond = json::object();
    for (const auto& [name, acc] : r.condition_accuracy) cond[name] = acc;
    rows.push_back(json{{"variant", r.variant},
                        {"dataset_id", r.dataset_id},
                        {"model_id", r.model_id},
                        {"leakage_error", r.leakage_error},
                        {"answerability_accuracy", r.answerability_accuracy},
                        {"retriever_spread", r.retriever_spread},
                        {"condition_accuracy", cond}});
  }
  return json{{"rows", rows}};
}

ComparisonReport comparison_from_json(const json& j) {
  ComparisonReport report;
  for (const auto& rj : j.at("rows")) {
    ComparisonRow row;
    row.variant = rj.value("variant", std::string());
    row.dataset_id = rj.value("dataset_id", std::string());
    row.model_id = rj.value("model_id", std::string());
    row.leakage_error = rj.value("leakage_error", 0.0);
    row.answerability_accuracy = rj.value("answerability_accuracy", 0.0);
    row.retriever_spread = rj.value("retriever_spread", 0.0);
    if (rj.contains("condition_accuracy")) {
      for (auto it = rj.at("condition_accuracy").begin();
           it != rj.at("condition_accuracy").end(); ++it) {
        row.condition_accuracy.emplace_back(it.key(), it.value().get<double>());
      }
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string comparison_to_csv(const ComparisonReport& report) {
  // union of condition names, stable order
  std::vector<std::string> conditions;
  for (const auto& r : report.rows) {
    for (const auto& [name, acc] : r.condition_accuracy) {
      if (std::find(conditions.begin(), conditions.end(), name) == conditions.end()) {
        conditions.push_back(name);
      }
    }
  }
  std::ostringstream out;
  out << "variant,dataset_id,model_id,leakage_error,answerability_accuracy,retriever_spread";
  for (const auto& c : conditions) out << "," << c;
  out << "\n";
  for (const auto& r : report.rows) {
    out << r.variant << "," << r.dataset_id << "," << r.model_id << ","
        << text::format_double(r.leakage_error) << ","
        << text::format_double(r.answerability_accuracy) << ","
        << text::format_double(r.retriever_spread);
    for (const auto& c : conditions) {
      out << ",";
      for (const auto& [name, acc] : r.condition_accuracy) {
        if (name == c) {
          out << text::format_double(acc);
          break;
        }
      }
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace seedforge
