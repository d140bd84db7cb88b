#include "seedforge/gateway.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <random>
#include <thread>

#include <nlohmann/json.hpp>

#include "seedforge/json_io.hpp"
#include "seedforge/log.hpp"
#include "seedforge/text.hpp"

// keep the heavy header out of gateway.hpp
#include <httplib.h>

namespace seedforge {

namespace {

using nlohmann::json;

constexpr char kFieldSep = '\x1f';

}  // namespace

std::string chat_fingerprint(const ChatRequest& req) {
  std::string canon = "chat";
  canon += kFieldSep;
  canon += req.system_prompt;
  canon += kFieldSep;
  canon += req.user_prompt;
  canon += kFieldSep;
  canon += text::format_double(req.temperature);
  canon += kFieldSep;
  canon += req.seed ? std::to_string(*req.seed) : "-";
  canon += kFieldSep;
  canon += std::to_string(req.max_output_tokens);
  return text::to_hex(text::fnv1a64(canon));
}

std::string embed_fingerprint(const EmbeddingRequest& req) {
  std::string canon = "embed";
  for (const auto& t : req.texts) {
    canon += kFieldSep;
    canon += t;
  }
  return text::to_hex(text::fnv1a64(canon));
}

// ---- MockGateway ----

MockGateway::MockGateway(std::string profile_name) : name_(std::move(profile_name)) {}

void MockGateway::script_fingerprint(const std::string& fingerprint, std::string response) {
  std::lock_guard lock(mu_);
  by_fingerprint_[fingerprint] = std::move(response);
}

void MockGateway::script_rule(std::string substring, std::vector<std::string> responses,
                              bool repeat) {
  script_rule(std::vector<std::string>{std::move(substring)}, std::move(responses), repeat);
}

void MockGateway::script_rule(std::vector<std::string> substrings,
                              std::vector<std::string> responses, bool repeat) {
  std::lock_guard lock(mu_);
  rules_.push_back({std::move(substrings), std::move(responses), repeat, 0});
}

void MockGateway::set_handler(Handler handler) {
  std::lock_guard lock(mu_);
  handler_ = std::move(handler);
}

void MockGateway::set_default_response(std::string response) {
  std::lock_guard lock(mu_);
  default_response_ = std::move(response);
}

std::shared_ptr<MockGateway> MockGateway::from_script_file(
    const std::filesystem::path& path, std::string profile_name) {
  json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) raise(ErrorCode::parse, "mock script not valid JSON: " + path.string());
  auto gw = std::make_shared<MockGateway>(std::move(profile_name));
  if (j.contains("fingerprints")) {
    for (auto it = j.at("fingerprints").begin(); it != j.at("fingerprints").end(); ++it) {
      gw->script_fingerprint(it.key(), it.value().get<std::string>());
    }
  }
  if (j.contains("rules")) {
    for (const auto& r : j.at("rules")) {
      std::vector<std::string> matchers;
      if (r.at("match").is_array()) {
        matchers = r.at("match").get<std::vector<std::string>>();
      } else {
        matchers.push_back(r.at("match").get<std::string>());
      }
      gw->script_rule(std::move(matchers), r.at("responses").get<std::vector<std::string>>(),
                      r.value("repeat", false));
    }
  }
  if (j.contains("default")) gw->set_default_response(j.at("default").get<std::string>());
  return gw;
}

std::string MockGateway::complete(const ChatRequest& request) {
  std::lock_guard lock(mu_);
  seen_.push_back(request);
  auto fp = chat_fingerprint(request);
  if (auto it = by_fingerprint_.find(fp); it != by_fingerprint_.end()) {
    return it->second;
  }
  for (auto& rule : rules_) {
    bool matched = true;
    for (const auto& sub : rule.substrings) {
      if (request.user_prompt.find(sub) == std::string::npos &&
          request.system_prompt.find(sub) == std::string::npos) {
        matched = false;
        break;
      }
    }
    if (!matched) continue;
    if (rule.next < rule.responses.size()) {
      const std::string& r = rule.responses[rule.next];
      if (rule.next + 1 < rule.responses.size() || !rule.repeat) ++rule.next;
      return r;
    }
  }
  if (handler_) {
    if (auto r = handler_(request)) return *r;
  }
  if (default_response_) return *default_response_;
  raise(ErrorCode::script_exhausted,
        "mock has no response for request fingerprint " + fp);
}

std::vector<double> MockGateway::hash_embedding(const std::string& txt) {
  // mt19937_64 output mapped to [-1, 1) by hand: bit-identical on every
  // platform, unlike uniform_real_distribution
  std::mt19937_64 rng(text::fnv1a64(txt));
  std::vector<double> v(kEmbeddingDim);
  double norm_sq = 0.0;
  for (double& x : v) {
    x = static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
    norm_sq += x * x;
  }
  double norm = std::sqrt(norm_sq);
  if (norm == 0.0) {
    v[0] = 1.0;
    return v;
  }
  for (double& x : v) x /= norm;
  return v;
}

std::vector<std::vector<double>> MockGateway::embed(const EmbeddingRequest& request) {
  if (request.texts.empty()) raise(ErrorCode::invalid_argument, "embed: empty text list");
  std::vector<std::vector<double>> out;
  out.reserve(request.texts.size());
  for (const auto& t : request.texts) {
    if (t.empty()) raise(ErrorCode::invalid_argument, "embed: empty text");
    out.push_back(hash_embedding(t));
  }
  return out;
}

std::vector<ChatRequest> MockGateway::requests() const {
  std::lock_guard lock(mu_);
  return seen_;
}

// ---- HttpGateway ----

namespace {

HttpGateway::Transport make_httplib_transport(const BackendProfile& profile) {
  // One client per call keeps the transport stateless; fine at desk scale.
  return [profile](const std::string& path, const std::string& body) {
    httplib::Client client(profile.endpoint);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(
        profile.request_timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(
        profile.request_timeout));
    httplib::Headers headers;
    if (!profile.auth_env.empty()) {
      const char* key = std::getenv(profile.auth_env.c_str());
      headers.emplace("Authorization", std::string("Bearer ") + (key ? key : ""));
    }
    auto res = client.Post(path, headers, body, "application/json");
    if (!res) {
      raise(ErrorCode::transport,
            "POST " + profile.endpoint + path + " failed: " + httplib::to_string(res.error()));
    }
    return HttpGateway::HttpResponse{res->status, res->body};
  };
}

}  // namespace

HttpGateway::HttpGateway(BackendProfile profile)
    : profile_(std::move(profile)), transport_(make_httplib_transport(profile_)) {
  bucket_stamp_ = std::chrono::steady_clock::now();
  bucket_tokens_ = profile_.rate_limit_per_s;
}

HttpGateway::HttpGateway(BackendProfile profile, Transport transport)
    : profile_(std::move(profile)), transport_(std::move(transport)) {
  bucket_stamp_ = std::chrono::steady_clock::now();
  bucket_tokens_ = profile_.rate_limit_per_s;
}

void HttpGateway::rate_limit_acquire() {
  if (profile_.rate_limit_per_s <= 0) return;
  std::unique_lock lock(rate_mu_);
  for (;;) {
    auto now = std::chrono::steady_clock::now();
    double elapsed = std::chrono::duration<double>(now - bucket_stamp_).count();
    bucket_stamp_ = now;
    bucket_tokens_ = std::min(profile_.rate_limit_per_s,
                              bucket_tokens_ + elapsed * profile_.rate_limit_per_s);
    if (bucket_tokens_ >= 1.0) {
      bucket_tokens_ -= 1.0;
      return;
    }
    double wait_s = (1.0 - bucket_tokens_) / profile_.rate_limit_per_s;
    lock.unlock();
    std::this_thread::sleep_for(std::chrono::duration<double>(wait_s));
    lock.lock();
  }
}

std::string HttpGateway::post_with_retries(const std::string& path, const std::string& body) {
  if (!profile_.auth_env.empty() && std::getenv(profile_.auth_env.c_str()) == nullptr) {
    raise(ErrorCode::auth, "credential env var not set: " + profile_.auth_env);
  }
  int attempts = profile_.retry.max_retries + 1;
  std::string last_error;
  for (int i = 0; i < attempts; ++i) {
    if (i > 0) {
      auto backoff = profile_.retry.backoff_base * (1 << (i - 1));
      std::this_thread::sleep_for(backoff);
    }
    rate_limit_acquire();
    std::optional<HttpResponse> res;
    try {
      res = transport_(path, body);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::transport) throw;
      last_error = e.what();
      continue;
    }
    if (res->status == 401 || res->status == 403) {
      raise(ErrorCode::auth,
            "backend rejected credentials (HTTP " + std::to_string(res->status) + ")");
    }
    if (res->status >= 200 && res->status < 300) return res->body;
    last_error = "HTTP " + std::to_string(res->status);
    if (res->status < 500 && res->status != 429) {
      // client errors are not retryable
      raise(ErrorCode::transport, last_error + ": " + res->body.substr(0, 200));
    }
  }
  raise(ErrorCode::transport, "retries exhausted: " + last_error);
}

std::string HttpGateway::complete(const ChatRequest& request) {
  json body{{"model", profile_.model},
            {"messages", json::array({json{{"role", "system"}, {"content", request.system_prompt}},
                                      json{{"role", "user"}, {"content", request.user_prompt}}})},
            {"temperature", request.temperature},
            {"max_tokens", request.max_output_tokens}};
  if (request.seed) body["seed"] = *request.seed;
  std::string raw = post_with_retries("/chat/completions", body.dump());
  json res = json::parse(raw, nullptr, false);
  if (res.is_discarded() || !res.contains("choices") || res.at("choices").empty()) {
    raise(ErrorCode::transport, "malformed chat completion response");
  }
  return res.at("choices").at(0).at("message").at("content").get<std::string>();
}

std::vector<std::vector<double>> HttpGateway::embed(const EmbeddingRequest& request) {
  if (request.texts.empty()) raise(ErrorCode::invalid_argument, "embed: empty text list");
  json body{{"model", profile_.embedding_model.empty() ? profile_.model
                                                       : profile_.embedding_model},
            {"input", request.texts}};
  std::string raw = post_with_retries("/embeddings", body.dump());
  json res = json::parse(raw, nullptr, false);
  if (res.is_discarded() || !res.contains("data")) {
    raise(ErrorCode::transport, "malformed embeddings response");
  }
  std::vector<std::vector<double>> out;
  for (const auto& item : res.at("data")) {
    auto v = item.at("embedding").get<std::vector<double>>();
    double norm_sq = 0.0;
    for (double x : v) norm_sq += x * x;
    double norm = std::sqrt(norm_sq);
    if (norm > 0) {
      for (double& x : v) x /= norm;
    }
    out.push_back(std::move(v));
  }
  if (out.size() != request.texts.size()) {
    raise(ErrorCode::transport, "embedding count mismatch");
  }
  return out;
}

// ---- CassetteGateway ----

CassetteMode cassette_mode_from_name(const std::string& name) {
  if (name == "off" || name.empty()) return CassetteMode::off;
  if (name == "record") return CassetteMode::record;
  if (name == "replay") return CassetteMode::replay;
  raise(ErrorCode::parse, "unknown cassette mode: " + name);
}

CassetteStore::CassetteStore(std::filesystem::path path, bool must_exist)
    : path_(std::move(path)) {
  if (std::filesystem::exists(path_)) {
    for (const auto& row : read_jsonl(path_)) {
      std::string fp = row.at("fingerprint").get<std::string>();
      std::string kind = row.value("kind", std::string("complete"));
      if (kind == "complete") {
        completions_[fp] = row.at("response").get<std::string>();
      } else {
        embeddings_[fp] = row.at("vectors").get<std::vector<std::vector<double>>>();
      }
    }
  } else if (must_exist) {
    raise(ErrorCode::io, "cassette file missing: " + path_.string());
  }
}

std::optional<std::string> CassetteStore::lookup_complete(const std::string& fingerprint) {
  std::lock_guard lock(mu_);
  if (auto it = completions_.find(fingerprint); it != completions_.end()) {
    replay_hits_.fetch_add(1);
    return it->second;
  }
  return std::nullopt;
}

std::optional<std::vector<std::vector<double>>> CassetteStore::lookup_embed(
    const std::string& fingerprint) {
  std::lock_guard lock(mu_);
  if (auto it = embeddings_.find(fingerprint); it != embeddings_.end()) {
    replay_hits_.fetch_add(1);
    return it->second;
  }
  return std::nullopt;
}

void CassetteStore::append_entry(const std::string& line) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  std::ofstream out(path_, std::ios::app);
  if (!out) raise(ErrorCode::io, "cannot append to cassette " + path_.string());
  out << line << "\n";
}

void CassetteStore::record_complete(const std::string& fingerprint,
                                    const std::string& response) {
  std::lock_guard lock(mu_);
  if (!completions_.emplace(fingerprint, response).second) return;  // already recorded
  append_entry(
      json{{"fingerprint", fingerprint}, {"kind", "complete"}, {"response", response}}.dump());
}

void CassetteStore::record_embed(const std::string& fingerprint,
                                 const std::vector<std::vector<double>>& vectors) {
  std::lock_guard lock(mu_);
  if (!embeddings_.emplace(fingerprint, vectors).second) return;
  append_entry(
      json{{"fingerprint", fingerprint}, {"kind", "embed"}, {"vectors", vectors}}.dump());
}

std::size_t CassetteStore::size() const {
  std::lock_guard lock(mu_);
  return completions_.size() + embeddings_.size();
}

CassetteGateway::CassetteGateway(CassetteMode mode, std::shared_ptr<CassetteStore> store,
                                 std::shared_ptr<Gateway> inner)
    : mode_(mode), store_(std::move(store)), inner_(std::move(inner)) {
  name_ = inner_ ? inner_->profile_name() : "cassette";
  if (mode_ != CassetteMode::replay && !inner_) {
    raise(ErrorCode::invalid_argument, "cassette mode requires an inner gateway");
  }
  if (mode_ != CassetteMode::off && !store_) {
    raise(ErrorCode::invalid_argument, "cassette mode requires a store");
  }
}

std::string CassetteGateway::complete(const ChatRequest& request) {
  if (mode_ == CassetteMode::off) return inner_->complete(request);
  std::string fp = chat_fingerprint(request);
  if (auto hit = store_->lookup_complete(fp)) return *hit;
  if (mode_ == CassetteMode::replay) {
    raise(ErrorCode::cassette_miss, "no cassette entry for fingerprint " + fp);
  }
  std::string response = inner_->complete(request);
  store_->record_complete(fp, response);
  return response;
}

std::vector<std::vector<double>> CassetteGateway::embed(const EmbeddingRequest& request) {
  if (mode_ == CassetteMode::off) return inner_->embed(request);
  std::string fp = embed_fingerprint(request);
  if (auto hit = store_->lookup_embed(fp)) return *hit;
  if (mode_ == CassetteMode::replay) {
    raise(ErrorCode::cassette_miss, "no cassette entry for fingerprint " + fp);
  }
  auto vectors = inner_->embed(request);
  store_->record_embed(fp, vectors);
  return vectors;
}

const std::string& CassetteGateway::profile_name() const { return name_; }

// ---- InstrumentedGateway ----

InstrumentedGateway::InstrumentedGateway(std::shared_ptr<Gateway> inner,
                                         std::shared_ptr<GatewayUsage> usage)
    : inner_(std::move(inner)), usage_(std::move(usage)) {}

std::string InstrumentedGateway::complete(const ChatRequest& request) {
  usage_->complete_calls.fetch_add(1);
  return inner_->complete(request);
}

std::vector<std::vector<double>> InstrumentedGateway::embed(const EmbeddingRequest& request) {
  usage_->embed_calls.fetch_add(1);
  return inner_->embed(request);
}

const std::string& InstrumentedGateway::profile_name() const {
  return inner_->profile_name();
}

std::shared_ptr<Gateway> make_gateway(const BackendProfile& profile) {
  if (profile.endpoint == "mock" || profile.endpoint.empty() || !profile.script_path.empty()) {
    if (!profile.script_path.empty()) {
      return MockGateway::from_script_file(profile.script_path, profile.name);
    }
    auto gw = std::make_shared<MockGateway>(profile.name);
    gw->set_default_response("Unknown.");
    return gw;
  }
  return std::make_shared<HttpGateway>(profile);
}

}  // namespace seedforge
