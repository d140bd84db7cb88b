#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "seedforge/gateway.hpp"
#include "seedforge/model.hpp"

namespace seedforge {

struct RetrievedSet {
  std::vector<std::string> doc_ids;
  std::vector<double> scores;  // parallel, non-increasing
};

class Retriever {
 public:
  virtual ~Retriever() = default;
  virtual RetrievedSet retrieve(const std::string& question, int top_k) = 0;
  virtual const std::string& name() const = 0;
};

// Cosine similarity over unit-norm embeddings; ties broken by corpus
// order; exactly top_k results. Document embeddings are cached per corpus.
class SemanticRetriever : public Retriever {
 public:
  SemanticRetriever(std::vector<Document> corpus, std::shared_ptr<Gateway> gateway,
                    std::string name = "semantic");

  RetrievedSet retrieve(const std::string& question, int top_k) override;
  const std::string& name() const override { return name_; }

 private:
  void ensure_corpus_embedded();

  std::vector<Document> corpus_;
  std::shared_ptr<Gateway> gateway_;
  std::string name_;
  std::vector<std::vector<double>> doc_embeddings_;
  bool embedded_ = false;
};

// Free-function form of the same ranking, per-call.
RetrievedSet semantic_retrieve(const std::string& question,
                               const std::vector<Document>& corpus, int top_k,
                               Gateway& gateway);

// External adapter over a subprocess: one {"question","top_k"} JSON line on
// stdin, one {"doc_ids","scores"} JSON line on stdout per request. The
// corpus is handed over as a JSONL file path appended to the command line.
class StdioRetriever : public Retriever {
 public:
  StdioRetriever(std::string name, std::string command,
                 std::filesystem::path corpus_path);
  ~StdioRetriever() override;

  RetrievedSet retrieve(const std::string& question, int top_k) override;
  const std::string& name() const override { return name_; }

 private:
  void spawn();

  std::string name_;
  std::string command_;
  std::filesystem::path corpus_path_;
  int child_pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string read_buffer_;
};

// External adapter over HTTP: POST {"question","top_k"} to the endpoint,
// same response schema as the stdio protocol.
class HttpRetriever : public Retriever {
 public:
  HttpRetriever(std::string name, std::string endpoint);

  RetrievedSet retrieve(const std::string& question, int top_k) override;
  const std::string& name() const override { return name_; }

 private:
  std::string name_;
  std::string endpoint_;
};

}  // namespace seedforge
