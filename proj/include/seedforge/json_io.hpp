#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "seedforge/model.hpp"

namespace seedforge {

nlohmann::json to_json(const Document& d);
nlohmann::json to_json(const Sample& s);
nlohmann::json to_json(const Entity& e);
nlohmann::json to_json(const Triplet& t);
nlohmann::json to_json(const ReasoningGraph& g);
nlohmann::json to_json(const EntityMapping& m);
nlohmann::json to_json(const GeneratedSample& g);
nlohmann::json to_json(const EvalRecord& r);
nlohmann::json to_json(const BenchmarkMetrics& m);

Document document_from_json(const nlohmann::json& j);
Sample sample_from_json(const nlohmann::json& j);
Entity entity_from_json(const nlohmann::json& j);
Triplet triplet_from_json(const nlohmann::json& j);
ReasoningGraph graph_from_json(const nlohmann::json& j);
EntityMapping mapping_from_json(const nlohmann::json& j);
GeneratedSample generated_sample_from_json(const nlohmann::json& j);
EvalRecord eval_record_from_json(const nlohmann::json& j);
BenchmarkMetrics metrics_from_json(const nlohmann::json& j);

std::vector<Triplet> triplets_from_json(const nlohmann::json& j);
nlohmann::json triplets_to_json(const std::vector<Triplet>& triplets);

// JSONL helpers. Readers throw Error(parse) with the offending line number;
// writers emit one compact object per line.
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path,
                 const std::vector<nlohmann::json>& rows);

std::vector<Sample> read_samples(const std::filesystem::path& path);
void write_samples(const std::filesystem::path& path,
                   const std::vector<Sample>& samples);

std::vector<GeneratedSample> read_generated(const std::filesystem::path& path);
void write_generated(const std::filesystem::path& path,
                     const std::vector<GeneratedSample>& samples);

// Atomic file replace: write to <path>.tmp, then rename over <path>.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

std::string read_file(const std::filesystem::path& path);

std::string sha256_hex(std::string_view data);

// Import adapters for native distribution schemas (see docs/datasets.md).
// `scheme` is one of "hotpotqa", "2wikimultihopqa" (alias "wikihop"),
// "qasc", "jsonl" (already-canonical records).
std::vector<Sample> import_dataset(const std::string& scheme,
                                   const std::filesystem::path& path);

}  // namespace seedforge
