#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "seedforge/errors.hpp"

namespace seedforge {

struct ChatRequest {
  std::string system_prompt;
  std::string user_prompt;
  double temperature = 0.0;
  int max_output_tokens = 512;
  std::optional<std::int64_t> seed;
};

struct EmbeddingRequest {
  std::vector<std::string> texts;
};

struct RetryPolicy {
  int max_retries = 2;
  std::chrono::milliseconds backoff_base{200};
};

struct BackendProfile {
  std::string name;      // role label: "generator", "verifier_probe", "mock", ...
  std::string endpoint;  // base URL for HTTP backends
  std::string model;     // concrete model id; config concern, never hardcoded
  std::string auth_env;  // env var holding the credential
  std::chrono::milliseconds request_timeout{30000};
  RetryPolicy retry;
  double rate_limit_per_s = 0.0;  // 0 = unlimited
  std::string script_path;        // mock profiles: scripted responses
  std::string embedding_model;
};

// Stable request fingerprint: cassette key and mock script key. Hash of
// (system_prompt, user_prompt, temperature, seed, max_output_tokens).
std::string chat_fingerprint(const ChatRequest& req);
std::string embed_fingerprint(const EmbeddingRequest& req);

struct GatewayUsage {
  std::atomic<std::uint64_t> complete_calls{0};
  std::atomic<std::uint64_t> embed_calls{0};
};

class Gateway {
 public:
  virtual ~Gateway() = default;

  // Returns generated text. Throws Error(auth|transport|script_exhausted|
  // cassette_miss) per backend.
  virtual std::string complete(const ChatRequest& request) = 0;

  // One unit-norm vector per input text.
  virtual std::vector<std::vector<double>> embed(const EmbeddingRequest& request) = 0;

  virtual const std::string& profile_name() const = 0;
};

// Deterministic scripted backend. Responses come from, in order of
// precedence: an exact fingerprint entry, the first substring rule with
// responses left, a programmatic handler, then the default response.
// Nothing applicable -> Error(script_exhausted).
class MockGateway : public Gateway {
 public:
  using Handler = std::function<std::optional<std::string>(const ChatRequest&)>;

  explicit MockGateway(std::string profile_name = "mock");

  void script_fingerprint(const std::string& fingerprint, std::string response);
  // Rule matched when every listed substring occurs in the system or user
  // prompt; each response is consumed once, in order. With repeat=true the
  // last response answers forever.
  void script_rule(std::string substring, std::vector<std::string> responses,
                   bool repeat = false);
  void script_rule(std::vector<std::string> substrings, std::vector<std::string> responses,
                   bool repeat = false);
  void set_handler(Handler handler);
  void set_default_response(std::string response);

  // Script file format:
  //   {"rules": [{"match": "..." | ["...", ...],
  //               "responses": [...], "repeat": false}],
  //    "fingerprints": {fp: response}, "default": "..."}
  static std::shared_ptr<MockGateway> from_script_file(
      const std::filesystem::path& path, std::string profile_name = "mock");

  std::string complete(const ChatRequest& request) override;
  std::vector<std::vector<double>> embed(const EmbeddingRequest& request) override;
  const std::string& profile_name() const override { return name_; }

  // Every request seen, in order; lets tests inspect prompt contents.
  std::vector<ChatRequest> requests() const;

  static std::vector<double> hash_embedding(const std::string& text);
  static constexpr int kEmbeddingDim = 32;

 private:
  struct Rule {
    std::vector<std::string> substrings;
    std::vector<std::string> responses;
    bool repeat = false;
    std::size_t next = 0;
  };

  mutable std::mutex mu_;
  std::string name_;
  std::map<std::string, std::string> by_fingerprint_;
  std::vector<Rule> rules_;
  Handler handler_;
  std::optional<std::string> default_response_;
  std::vector<ChatRequest> seen_;
};

// OpenAI-style chat/embeddings HTTP backend. Transport is injectable so the
// retry policy is testable without sockets.
class HttpGateway : public Gateway {
 public:
  struct HttpResponse {
    int status = 0;
    std::string body;
  };
  // (path, json_body) -> response; throws Error(transport) on connection
  // failure.
  using Transport = std::function<HttpResponse(const std::string& path,
                                               const std::string& body)>;

  explicit HttpGateway(BackendProfile profile);
  HttpGateway(BackendProfile profile, Transport transport);

  std::string complete(const ChatRequest& request) override;
  std::vector<std::vector<double>> embed(const EmbeddingRequest& request) override;
  const std::string& profile_name() const override { return profile_.name; }

 private:
  std::string post_with_retries(const std::string& path, const std::string& body);
  void rate_limit_acquire();

  BackendProfile profile_;
  Transport transport_;
  std::mutex rate_mu_;
  double bucket_tokens_ = 0.0;
  std::chrono::steady_clock::time_point bucket_stamp_{};
};

enum class CassetteMode { off, record, replay };

CassetteMode cassette_mode_from_name(const std::string& name);

// Persisted {fingerprint -> response} pairs, JSONL on disk. One store may
// back several role gateways; a single writer lock serializes appends.
class CassetteStore {
 public:
  explicit CassetteStore(std::filesystem::path path, bool must_exist);

  std::optional<std::string> lookup_complete(const std::string& fingerprint);
  std::optional<std::vector<std::vector<double>>> lookup_embed(const std::string& fingerprint);
  void record_complete(const std::string& fingerprint, const std::string& response);
  void record_embed(const std::string& fingerprint,
                    const std::vector<std::vector<double>>& vectors);

  std::uint64_t replay_hits() const { return replay_hits_.load(); }
  std::size_t size() const;

 private:
  void append_entry(const std::string& line);

  std::filesystem::path path_;
  mutable std::mutex mu_;
  std::map<std::string, std::string> completions_;
  std::map<std::string, std::vector<std::vector<double>>> embeddings_;
  std::atomic<std::uint64_t> replay_hits_{0};
};

// Record/replay wrapper. Record mode passes through and appends to the
// store; replay mode serves from it and never touches the inner gateway.
class CassetteGateway : public Gateway {
 public:
  CassetteGateway(CassetteMode mode, std::shared_ptr<CassetteStore> store,
                  std::shared_ptr<Gateway> inner);

  std::string complete(const ChatRequest& request) override;
  std::vector<std::vector<double>> embed(const EmbeddingRequest& request) override;
  const std::string& profile_name() const override;

 private:
  CassetteMode mode_;
  std::shared_ptr<CassetteStore> store_;
  std::shared_ptr<Gateway> inner_;
  std::string name_;
};

// Counts calls on behalf of run manifests and budget assertions.
class InstrumentedGateway : public Gateway {
 public:
  InstrumentedGateway(std::shared_ptr<Gateway> inner,
                      std::shared_ptr<GatewayUsage> usage);

  std::string complete(const ChatRequest& request) override;
  std::vector<std::vector<double>> embed(const EmbeddingRequest& request) override;
  const std::string& profile_name() const override;

 private:
  std::shared_ptr<Gateway> inner_;
  std::shared_ptr<GatewayUsage> usage_;
};

// Profile -> concrete gateway. Mock profiles (endpoint "mock" or a
// script_path) get a MockGateway; anything else an HttpGateway. The
// cassette wrapper is applied by callers that own a cassette config.
std::shared_ptr<Gateway> make_gateway(const BackendProfile& profile);

}  // namespace seedforge
