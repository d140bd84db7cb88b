#include "seedforge/json_io.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "seedforge/errors.hpp"
#include "seedforge/text.hpp"

namespace seedforge {

namespace {

using nlohmann::json;

const char* kKnownSampleFields[] = {"id",          "question",  "answer",
                                    "contexts",    "supporting_ids",
                                    "source_dataset", "choices"};

bool is_known_sample_field(const std::string& key) {
  for (const char* f : kKnownSampleFields) {
    if (key == f) return true;
  }
  return false;
}

json require(const json& j, const char* key) {
  if (!j.contains(key)) {
    raise(ErrorCode::parse, std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

}  // namespace

json to_json(const Document& d) {
  return json{{"doc_id", d.doc_id}, {"title", d.title}, {"body", d.body}};
}

Document document_from_json(const json& j) {
  Document d;
  d.doc_id = require(j, "doc_id").get<std::string>();
  d.title = j.value("title", std::string());
  d.body = j.value("body", std::string());
  return d;
}

json to_json(const Sample& s) {
  json j = s.extra.is_object() ? s.extra : json::object();
  j["id"] = s.id;
  j["question"] = s.question;
  j["answer"] = s.answer;
  j["contexts"] = json::array();
  for (const auto& d : s.contexts) j["contexts"].push_back(to_json(d));
  if (s.supporting_ids) j["supporting_ids"] = *s.supporting_ids;
  j["source_dataset"] = s.source_dataset;
  if (s.choices) j["choices"] = *s.choices;
  return j;
}

Sample sample_from_json(const json& j) {
  Sample s;
  s.id = require(j, "id").get<std::string>();
  s.question = require(j, "question").get<std::string>();
  s.answer = require(j, "answer").get<std::string>();
  if (j.contains("contexts")) {
    for (const auto& dj : j.at("contexts")) s.contexts.push_back(document_from_json(dj));
  }
  if (j.contains("supporting_ids") && !j.at("supporting_ids").is_null()) {
    s.supporting_ids = j.at("supporting_ids").get<std::vector<std::string>>();
  }
  s.source_dataset = j.value("source_dataset", std::string("custom"));
  if (j.contains("choices") && !j.at("choices").is_null()) {
    s.choices = j.at("choices").get<std::vector<std::string>>();
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!is_known_sample_field(it.key())) s.extra[it.key()] = it.value();
  }
  return s;
}

json to_json(const Entity& e) {
  json j{{"surface", e.surface}, {"type", e.semantic_type}};
  if (!e.aliases.empty()) j["aliases"] = e.aliases;
  return j;
}

Entity entity_from_json(const json& j) {
  Entity e;
  e.surface = require(j, "surface").get<std::string>();
  e.semantic_type = j.value("type", j.value("semantic_type", std::string()));
  if (j.contains("aliases") && !j.at("aliases").is_null()) {
    e.aliases = j.at("aliases").get<std::vector<std::string>>();
  }
  return e;
}

json to_json(const Triplet& t) {
  return json{{"subject", to_json(t.subject)},
              {"relation", t.relation},
              {"object", to_json(t.object)}};
}

Triplet triplet_from_json(const json& j) {
  Triplet t;
  t.subject = entity_from_json(require(j, "subject"));
  t.relation = require(j, "relation").get<std::string>();
  t.object = entity_from_json(require(j, "object"));
  return t;
}

std::vector<Triplet> triplets_from_json(const json& j) {
  const json& arr = j.is_array() ? j : require(j, "triplets");
  std::vector<Triplet> out;
  for (const auto& tj : arr) out.push_back(triplet_from_json(tj));
  return out;
}

json triplets_to_json(const std::vector<Triplet>& triplets) {
  json arr = json::array();
  for (const auto& t : triplets) arr.push_back(to_json(t));
  return arr;
}

json to_json(const ReasoningGraph& g) {
  json nodes = json::array();
  for (const auto& n : g.nodes) {
    json nj = to_json(n.entity);
    nj["id"] = n.id;
    nodes.push_back(nj);
  }
  json edges = json::array();
  for (const auto& e : g.edges) {
    edges.push_back(json{{"src", e.src}, {"rel", e.relation}, {"dst", e.dst}});
  }
  return json{{"schema_version", 1},
              {"kind", graph_kind_name(g.kind)},
              {"nodes", nodes},
              {"edges", edges}};
}

ReasoningGraph graph_from_json(const json& j) {
  GraphKind kind = j.contains("kind")
                       ? graph_kind_from_name(j.at("kind").get<std::string>())
                       : GraphKind::context_graph;
  std::vector<GraphNode> nodes;
  for (const auto& nj : require(j, "nodes")) {
    GraphNode n;
    n.entity = entity_from_json(nj);
    n.id = nj.value("id", n.entity.surface);
    nodes.push_back(std::move(n));
  }
  std::vector<GraphEdge> edges;
  for (const auto& ej : require(j, "edges")) {
    GraphEdge e;
    e.src = require(ej, "src").get<std::string>();
    e.relation = ej.value("rel", ej.value("relation", std::string()));
    e.dst = require(ej, "dst").get<std::string>();
    edges.push_back(std::move(e));
  }
  return ReasoningGraph::build(kind, std::move(nodes), std::move(edges));
}

json to_json(const EntityMapping& m) {
  json pairs = json::array();
  for (const auto& p : m.pairs()) {
    pairs.push_back(json{{"seed", to_json(p.seed)}, {"replacement", to_json(p.replacement)}});
  }
  return json{{"pairs", pairs}, {"exclusions", m.exclusions()}};
}

EntityMapping mapping_from_json(const json& j) {
  std::vector<MappingPair> pairs;
  for (const auto& pj : require(j, "pairs")) {
    pairs.push_back({entity_from_json(require(pj, "seed")),
                     entity_from_json(require(pj, "replacement"))});
  }
  std::vector<std::string> exclusions;
  if (j.contains("exclusions")) {
    exclusions = j.at("exclusions").get<std::vector<std::string>>();
  }
  return EntityMapping::create(std::move(pairs), std::move(exclusions));
}

json to_json(const GeneratedSample& g) {
  json j = g.extra.is_object() ? g.extra : json::object();
  j["seed_id"] = g.seed_id;
  j["sample"] = to_json(g.sample);
  j["mapping"] = to_json(g.mapping);
  j["context_path"] = context_path_name(g.context_path);
  j["question_graph"] = to_json(g.question_graph);
  j["context_graph"] = to_json(g.context_graph);
  j["provenance"] = json{{"attempts", g.provenance.attempts},
                         {"generator_backend", g.provenance.generator_backend},
                         {"verifier_backend", g.provenance.verifier_backend},
                         {"timestamp", g.provenance.timestamp}};
  return j;
}

GeneratedSample generated_sample_from_json(const json& j) {
  GeneratedSample g;
  g.seed_id = require(j, "seed_id").get<std::string>();
  g.sample = sample_from_json(require(j, "sample"));
  g.mapping = mapping_from_json(require(j, "mapping"));
  g.context_path = context_path_from_name(require(j, "context_path").get<std::string>());
  g.question_graph = graph_from_json(require(j, "question_graph"));
  g.context_graph = graph_from_json(require(j, "context_graph"));
  const json& p = require(j, "provenance");
  g.provenance.attempts = p.value("attempts", 1);
  g.provenance.generator_backend = p.value("generator_backend", std::string());
  g.provenance.verifier_backend = p.value("verifier_backend", std::string());
  g.provenance.timestamp = p.value("timestamp", std::string());
  static const char* kKnown[] = {"seed_id",        "sample",        "mapping",
                                 "context_path",   "question_graph", "context_graph",
                                 "provenance"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : kKnown) known = known || it.key() == k;
    if (!known) g.extra[it.key()] = it.value();
  }
  return g;
}

json to_json(const EvalRecord& r) {
  json j{{"sample_id", r.sample_id},
         {"condition", condition_kind_name(r.condition)},
         {"model_response", r.model_response},
         {"correct", r.correct}};
  if (r.condition == ConditionKind::retriever) j["retriever_name"] = r.retriever_name;
  if (r.errored) {
    j["errored"] = true;
    j["error_reason"] = r.error_reason;
  }
  if (r.quality_class) j["quality_class"] = quality_class_name(*r.quality_class);
  return j;
}

EvalRecord eval_record_from_json(const json& j) {
  EvalRecord r;
  r.sample_id = require(j, "sample_id").get<std::string>();
  r.condition = condition_kind_from_name(require(j, "condition").get<std::string>());
  r.retriever_name = j.value("retriever_name", std::string());
  r.model_response = j.value("model_response", std::string());
  r.correct = j.value("correct", false);
  r.errored = j.value("errored", false);
  r.error_reason = j.value("error_reason", std::string());
  if (j.contains("quality_class") && !j.at("quality_class").is_null()) {
    r.quality_class = quality_class_from_name(j.at("quality_class").get<std::string>());
  }
  return r;
}

json to_json(const BenchmarkMetrics& m) {
  return json{{"dataset_id", m.dataset_id},
              {"model_id", m.model_id},
              {"acc_no_ctx", m.acc_no_ctx},
              {"acc_gold", m.acc_gold},
              {"leakage_error", m.leakage_error},
              {"answerability_accuracy", m.answerability_accuracy},
              {"n_questions", m.n_questions}};
}

BenchmarkMetrics metrics_from_json(const json& j) {
  BenchmarkMetrics m;
  m.dataset_id = j.value("dataset_id", std::string());
  m.model_id = j.value("model_id", std::string());
  m.acc_no_ctx = require(j, "acc_no_ctx").get<double>();
  m.acc_gold = require(j, "acc_gold").get<double>();
  m.leakage_error = j.value("leakage_error", m.acc_no_ctx);
  m.answerability_accuracy = j.value("answerability_accuracy", m.acc_gold - m.acc_no_ctx);
  m.n_questions = j.value("n_questions", 0);
  return m;
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::io, "cannot open " + path.string());
  std::vector<json> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      raise(ErrorCode::parse, path.string() + ":" + std::to_string(lineno) +
                                  ": invalid JSON");
    }
    rows.push_back(std::move(j));
  }
  return rows;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& rows) {
  std::ostringstream out;
  for (const auto& row : rows) out << row.dump() << "\n";
  write_file_atomic(path, out.str());
}

std::vector<Sample> read_samples(const std::filesystem::path& path) {
  std::vector<Sample> out;
  for (const auto& row : read_jsonl(path)) {
    try {
      out.push_back(sample_from_json(row));
    } catch (const json::exception& e) {
      raise(ErrorCode::parse, path.string() + ": bad sample record: " + e.what());
    }
  }
  return out;
}

void write_samples(const std::filesystem::path& path, const std::vector<Sample>& samples) {
  std::vector<json> rows;
  rows.reserve(samples.size());
  for (const auto& s : samples) rows.push_back(to_json(s));
  write_jsonl(path, rows);
}

std::vector<GeneratedSample> read_generated(const std::filesystem::path& path) {
  std::vector<GeneratedSample> out;
  for (const auto& row : read_jsonl(path)) {
    try {
      out.push_back(generated_sample_from_json(row));
    } catch (const json::exception& e) {
      raise(ErrorCode::parse, path.string() + ": bad generated record: " + e.what());
    }
  }
  return out;
}

void write_generated(const std::filesystem::path& path,
                     const std::vector<GeneratedSample>& samples) {
  std::vector<json> rows;
  rows.reserve(samples.size());
  for (const auto& s : samples) rows.push_back(to_json(s));
  write_jsonl(path, rows);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::io, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) raise(ErrorCode::io, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) raise(ErrorCode::io, "rename " + tmp.string() + " -> " + path.string() +
                                   ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::io, "cannot open " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// ---- SHA-256 (FIPS 180-4), used for seeds-file fingerprints ----

namespace {

struct Sha256 {
  std::uint32_t h[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                        0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
  std::array<std::uint8_t, 64> block{};
  std::size_t block_len = 0;
  std::uint64_t total_len = 0;

  static std::uint32_t rotr(std::uint32_t x, int n) {
    return (x >> n) | (x << (32 - n));
  }

  void compress() {
    static const std::uint32_t k[64] = {
        0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
        0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
        0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
        0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
        0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
        0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
        0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
        0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
        0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
        0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
        0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};
    std::uint32_t w[64];
    for (int i = 0; i < 16; ++i) {
      w[i] = (std::uint32_t(block[4 * i]) << 24) | (std::uint32_t(block[4 * i + 1]) << 16) |
             (std::uint32_t(block[4 * i + 2]) << 8) | std::uint32_t(block[4 * i + 3]);
    }
    for (int i = 16; i < 64; ++i) {
      std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
      std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
      w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }
    std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4], f = h[5],
                  g = h[6], hh = h[7];
    for (int i = 0; i < 64; ++i) {
      std::uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
      std::uint32_t ch = (e & f) ^ (~e & g);
      std::uint32_t t1 = hh + s1 + ch + k[i] + w[i];
      std::uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
      std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
      std::uint32_t t2 = s0 + maj;
      hh = g; g = f; f = e; e = d + t1; d = c; c = b; b = a; a = t1 + t2;
    }
    h[0] += a; h[1] += b; h[2] += c; h[3] += d;
    h[4] += e; h[5] += f; h[6] += g; h[7] += hh;
  }

  void update(const std::uint8_t* data, std::size_t len) {
    total_len += len;
    while (len > 0) {
      std::size_t take = std::min(len, block.size() - block_len);
      std::memcpy(block.data() + block_len, data, take);
      block_len += take;
      data += take;
      len -= take;
      if (block_len == block.size()) {
        compress();
        block_len = 0;
      }
    }
  }

  std::string finish() {
    std::uint64_t bits = total_len * 8;
    std::uint8_t pad = 0x80;
    update(&pad, 1);
    std::uint8_t zero = 0;
    while (block_len != 56) update(&zero, 1);
    for (int i = 7; i >= 0; --i) {
      std::uint8_t b = static_cast<std::uint8_t>((bits >> (8 * i)) & 0xFF);
      update(&b, 1);
    }
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(64);
    for (std::uint32_t v : h) {
      for (int i = 28; i >= 0; i -= 4) out.push_back(digits[(v >> i) & 0xF]);
    }
    return out;
  }
};

}  // namespace

std::string sha256_hex(std::string_view data) {
  Sha256 s;
  s.update(reinterpret_cast<const std::uint8_t*>(data.data()), data.size());
  return s.finish();
}

// ---- import adapters (see docs/datasets.md) ----

namespace {

std::string join_sentences(const json& sentences) {
  std::string body;
  for (const auto& s : sentences) {
    if (!body.empty() && !body.ends_with(' ')) body.push_back(' ');
    body += s.get<std::string>();
  }
  return body;
}

// HotpotQA and 2WikiMultihopQA share the distribution schema:
// context = [[title, [sentence, ...]], ...], supporting_facts = [[title, idx], ...]
Sample from_hotpot_style(const json& j, const std::string& tag) {
  Sample s;
  s.id = j.contains("_id") ? j.at("_id").get<std::string>()
                           : require(j, "id").get<std::string>();
  s.question = require(j, "question").get<std::string>();
  s.answer = require(j, "answer").get<std::string>();
  s.source_dataset = tag;
  for (const auto& ctx : require(j, "context")) {
    Document d;
    d.title = ctx.at(0).get<std::string>();
    d.doc_id = d.title;
    d.body = join_sentences(ctx.at(1));
    s.contexts.push_back(std::move(d));
  }
  if (j.contains("supporting_facts")) {
    std::vector<std::string> ids;
    for (const auto& fact : j.at("supporting_facts")) {
      std::string title = fact.at(0).get<std::string>();
      if (std::find(ids.begin(), ids.end(), title) == ids.end()) ids.push_back(title);
    }
    s.supporting_ids = std::move(ids);
  }
  for (const char* k : {"type", "level", "evidences"}) {
    if (j.contains(k)) s.extra[k] = j.at(k);
  }
  return s;
}

// QASC: {id, question:{stem, choices:[{label,text}]}, answerKey, fact1, fact2}
Sample from_qasc(const json& j) {
  Sample s;
  s.id = require(j, "id").get<std::string>();
  const json& q = require(j, "question");
  s.question = require(q, "stem").get<std::string>();
  s.source_dataset = "qasc";
  std::vector<std::string> choices;
  std::string answer_key = j.value("answerKey", std::string());
  for (const auto& c : require(q, "choices")) {
    std::string label = c.value("label", std::string());
    std::string ctext = require(c, "text").get<std::string>();
    if (label == answer_key) s.answer = ctext;
    choices.push_back(std::move(ctext));
  }
  s.choices = std::move(choices);
  int di = 0;
  for (const char* k : {"fact1", "fact2", "combinedfact"}) {
    if (j.contains(k) && j.at(k).is_string()) {
      Document d;
      d.doc_id = "d" + std::to_string(di++);
      d.title = k;
      d.body = j.at(k).get<std::string>();
      s.contexts.push_back(std::move(d));
    }
  }
  if (s.contexts.size() >= 2) {
    s.supporting_ids = std::vector<std::string>{"d0", "d1"};
  }
  if (j.contains("formatted_question")) s.extra["formatted_question"] = j.at("formatted_question");
  return s;
}

std::vector<json> rows_from_json_or_jsonl(const std::filesystem::path& path) {
  // HotpotQA ships a single JSON array; QASC/2Wiki commonly ship JSONL.
  std::string content = read_file(path);
  std::string trimmed = text::trim(content);
  if (!trimmed.empty() && trimmed.front() == '[') {
    json arr = json::parse(trimmed, nullptr, false);
    if (arr.is_discarded()) raise(ErrorCode::parse, path.string() + ": invalid JSON array");
    return std::vector<json>(arr.begin(), arr.end());
  }
  return read_jsonl(path);
}

}  // namespace

std::vector<Sample> import_dataset(const std::string& scheme,
                                   const std::filesystem::path& path) {
  std::string tag = text::ascii_lower(scheme);
  std::vector<Sample> out;
  if (tag == "jsonl" || tag == "custom") {
    return read_samples(path);
  }
  for (const auto& row : rows_from_json_or_jsonl(path)) {
    if (tag == "hotpotqa") {
      out.push_back(from_hotpot_style(row, "hotpotqa"));
    } else if (tag == "2wikimultihopqa" || tag == "wikihop") {
      out.push_back(from_hotpot_style(row, "wikihop"));
    } else if (tag == "qasc") {
      out.push_back(from_qasc(row));
    } else {
      raise(ErrorCode::unsupported, "unknown import scheme: " + scheme);
    }
  }
  return out;
}

}  // namespace seedforge
