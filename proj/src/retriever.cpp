#include "seedforge/retriever.hpp"

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <numeric>

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "seedforge/errors.hpp"
#include "seedforge/json_io.hpp"
#include "seedforge/log.hpp"

namespace seedforge {

namespace {

using nlohmann::json;

std::string doc_text(const Document& d) {
  if (d.title.empty()) return d.body;
  return d.title + "\n" + d.body;
}

RetrievedSet rank_by_score(const std::vector<Document>& corpus,
                           const std::vector<double>& scores, int top_k) {
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  // ties broken by corpus order
  std::stable_sort(order.begin(), order.end(), [&scores](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  RetrievedSet out;
  for (int i = 0; i < top_k; ++i) {
    out.doc_ids.push_back(corpus[order[static_cast<std::size_t>(i)]].doc_id);
    out.scores.push_back(scores[order[static_cast<std::size_t>(i)]]);
  }
  return out;
}

RetrievedSet parse_retrieved(const json& j) {
  RetrievedSet out;
  out.doc_ids = j.at("doc_ids").get<std::vector<std::string>>();
  out.scores = j.at("scores").get<std::vector<double>>();
  if (out.doc_ids.size() != out.scores.size()) {
    raise(ErrorCode::parse, "retriever reply: doc_ids/scores length mismatch");
  }
  for (std::size_t i = 1; i < out.scores.size(); ++i) {
    if (out.scores[i] > out.scores[i - 1]) {
      raise(ErrorCode::parse, "retriever reply: scores not non-increasing");
    }
  }
  return out;
}

}  // namespace

RetrievedSet semantic_retrieve(const std::string& question,
                               const std::vector<Document>& corpus, int top_k,
                               Gateway& gateway) {
  if (top_k < 0 || static_cast<std::size_t>(top_k) > corpus.size()) {
    raise(ErrorCode::invalid_argument, "top_k exceeds corpus size");
  }
  if (corpus.empty() || top_k == 0) return {};
  EmbeddingRequest req;
  req.texts.push_back(question);
  for (const auto& d : corpus) req.texts.push_back(doc_text(d));
  auto vectors = gateway.embed(req);
  const auto& q = vectors[0];
  std::vector<double> scores(corpus.size(), 0.0);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& v = vectors[i + 1];
    double dot = 0.0;
    for (std::size_t k = 0; k < q.size() && k < v.size(); ++k) dot += q[k] * v[k];
    scores[i] = dot;  // unit-norm vectors: cosine == dot
  }
  return rank_by_score(corpus, scores, top_k);
}

SemanticRetriever::SemanticRetriever(std::vector<Document> corpus,
                                     std::shared_ptr<Gateway> gateway, std::string name)
    : corpus_(std::move(corpus)), gateway_(std::move(gateway)), name_(std::move(name)) {}

void SemanticRetriever::ensure_corpus_embedded() {
  if (embedded_) return;
  EmbeddingRequest req;
  for (const auto& d : corpus_) req.texts.push_back(doc_text(d));
  if (!req.texts.empty()) doc_embeddings_ = gateway_->embed(req);
  embedded_ = true;
}

RetrievedSet SemanticRetriever::retrieve(const std::string& question, int top_k) {
  if (top_k < 0 || static_cast<std::size_t>(top_k) > corpus_.size()) {
    raise(ErrorCode::invalid_argument, "top_k exceeds corpus size");
  }
  if (corpus_.empty() || top_k == 0) return {};
  ensure_corpus_embedded();
  auto q = gateway_->embed({{question}})[0];
  std::vector<double> scores(corpus_.size(), 0.0);
  for (std::size_t i = 0; i < corpus_.size(); ++i) {
    const auto& v = doc_embeddings_[i];
    double dot = 0.0;
    for (std::size_t k = 0; k < q.size() && k < v.size(); ++k) dot += q[k] * v[k];
    scores[i] = dot;
  }
  return rank_by_score(corpus_, scores, top_k);
}

// ---- stdio adapter ----

StdioRetriever::StdioRetriever(std::string name, std::string command,
                               std::filesystem::path corpus_path)
    : name_(std::move(name)), command_(std::move(command)),
      corpus_path_(std::move(corpus_path)) {}

StdioRetriever::~StdioRetriever() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  if (child_pid_ > 0) {
    int status = 0;
    waitpid(child_pid_, &status, 0);
  }
}

void StdioRetriever::spawn() {
  if (child_pid_ > 0) return;
  int in_pipe[2];   // parent -> child
  int out_pipe[2];  // child -> parent
  if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0) {
    raise(ErrorCode::io, std::string("pipe failed: ") + std::strerror(errno));
  }
  pid_t pid = fork();
  if (pid < 0) {
    raise(ErrorCode::io, std::string("fork failed: ") + std::strerror(errno));
  }
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    std::string cmd = command_ + " " + corpus_path_.string();
    execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  child_pid_ = pid;
}

RetrievedSet StdioRetriever::retrieve(const std::string& question, int top_k) {
  spawn();
  std::string line = json{{"question", question}, {"top_k", top_k}}.dump() + "\n";
  const char* data = line.data();
  std::size_t remaining = line.size();
  while (remaining > 0) {
    ssize_t n = write(to_child_, data, remaining);
    if (n <= 0) {
      raise(ErrorCode::transport, "retriever '" + name_ + "': write to subprocess failed");
    }
    data += n;
    remaining -= static_cast<std::size_t>(n);
  }
  for (;;) {
    std::size_t nl = read_buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string reply = read_buffer_.substr(0, nl);
      read_buffer_.erase(0, nl + 1);
      json j = json::parse(reply, nullptr, false);
      if (j.is_discarded()) {
        raise(ErrorCode::parse, "retriever '" + name_ + "': invalid JSON reply");
      }
      return parse_retrieved(j);
    }
    char buf[4096];
    ssize_t n = read(from_child_, buf, sizeof(buf));
    if (n <= 0) {
      raise(ErrorCode::transport, "retriever '" + name_ + "': subprocess closed stream");
    }
    read_buffer_.append(buf, static_cast<std::size_t>(n));
  }
}

// ---- HTTP adapter ----

HttpRetriever::HttpRetriever(std::string name, std::string endpoint)
    : name_(std::move(name)), endpoint_(std::move(endpoint)) {}

RetrievedSet HttpRetriever::retrieve(const std::string& question, int top_k) {
  std::string base = endpoint_;
  std::string path = "/retrieve";
  // split "<scheme>://host:port/path" into client base + path
  auto scheme_end = base.find("://");
  if (scheme_end != std::string::npos) {
    auto path_start = base.find('/', scheme_end + 3);
    if (path_start != std::string::npos) {
      path = base.substr(path_start);
      base = base.substr(0, path_start);
    }
  }
  httplib::Client client(base);
  auto res = client.Post(path, json{{"question", question}, {"top_k", top_k}}.dump(),
                         "application/json");
  if (!res || res->status < 200 || res->status >= 300) {
    raise(ErrorCode::transport,
          "retriever '" + name_ + "': POST " + endpoint_ + " failed");
  }
  json j = json::parse(res->body, nullptr, false);
  if (j.is_discarded()) {
    raise(ErrorCode::parse, "retriever '" + name_ + "': invalid JSON reply");
  }
  return parse_retrieved(j);
}

}  // namespace seedforge
