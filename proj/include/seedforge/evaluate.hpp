#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "seedforge/gateway.hpp"
#include "seedforge/model.hpp"
#include "seedforge/retriever.hpp"
#include "seedforge/templates.hpp"
#include "seedforge/verify.hpp"

namespace seedforge {

struct Condition {
  ConditionKind kind = ConditionKind::no_context;
  std::string retriever_name;  // present iff kind == retriever
  int top_k = 5;
};

struct EvalOptions {
  double temperature = 0.0;
  int max_output_tokens = 256;
  int workers = 1;
  AnswerMatcher matcher;  // empty -> answer_contains
};

// One record per sample under the given condition. Gateway failures mark
// the record errored; errored records stay out of accuracy denominators.
std::vector<EvalRecord> run_condition(const std::vector<Sample>& samples,
                                      const Condition& condition,
                                      const std::vector<Document>& corpus,
                                      Gateway& gateway,
                                      const TemplateStore& templates,
                                      Retriever* retriever = nullptr,
                                      const EvalOptions& options = {});

// Accuracies over non-errored records; throws Error(empty_evaluation) on
// empty inputs or empty id overlap, Error(invalid_argument) when the two
// record sets cover different sample ids.
BenchmarkMetrics compute_metrics(const std::vector<EvalRecord>& records_no_ctx,
                                 const std::vector<EvalRecord>& records_gold,
                                 const std::string& dataset_id,
                                 const std::string& model_id);

struct VariantEvaluation {
  std::string variant;  // e.g. "seedrg", "orig", "external"
  BenchmarkMetrics metrics;
  // retriever/condition name -> accuracy, as evaluated.
  std::vector<std::pair<std::string, double>> condition_accuracy;
};

struct ComparisonRow {
  std::string variant;
  std::string dataset_id;
  std::string model_id;
  double leakage_error = 0.0;
  double answerability_accuracy = 0.0;
  // max - min accuracy across retriever conditions (the differentiation
  // statistic); 0 when fewer than two retrievers were evaluated.
  double retriever_spread = 0.0;
  std::vector<std::pair<std::string, double>> condition_accuracy;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
};

// Side-by-side table of >= 2 benchmark variants evaluated under the same
// model profile.
ComparisonReport compare_benchmarks(const std::vector<VariantEvaluation>& variants);

nlohmann::json to_json(const ComparisonReport& report);
ComparisonReport comparison_from_json(const nlohmann::json& j);
std::string comparison_to_csv(const ComparisonReport& report);

}  // namespace seedforge
