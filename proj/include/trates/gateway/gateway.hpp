#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "trates/common/error.hpp"

namespace trates::gateway {

/// A rendered LLM call. The cache key covers the model, the template
/// identity and every substitution value, so any change in the inputs
/// produces a different key.
struct CompletionRequest {
  std::string model_id;
  std::string template_id;
  std::string template_version;
  std::vector<std::pair<std::string, std::string>> substitutions;  // in template order
  std::string instruction;
  std::string user_content;
  double temperature = 0.0;
  int max_tokens = 1024;
  /// Not part of the key; lets the mock backend see essay/question ids.
  std::map<std::string, std::string> metadata;

  const std::string* substitution(std::string_view name) const;
  void validate() const;
};

std::string cache_key(const CompletionRequest& req);

/// Raised by a backend for failures worth retrying (timeouts, 429, 5xx).
class TransientError : public Error {
 public:
  using Error::Error;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string complete(const CompletionRequest& req) = 0;
  virtual std::string name() const = 0;
};

/// OpenAI-compatible chat-completions client.
struct HttpConfig {
  std::string base_url;  // e.g. http://localhost:8000/v1
  std::string api_key;   // sent as a bearer token when non-empty
  std::chrono::seconds timeout{120};

  /// TRATES_LLM_BASE_URL and TRATES_LLM_API_KEY.
  static HttpConfig from_env();
};

class OpenAIBackend final : public Backend {
 public:
  explicit OpenAIBackend(HttpConfig cfg);
  std::string complete(const CompletionRequest& req) override;
  std::string name() const override { return "openai-compatible"; }

  /// Request body for `req` (exposed for tests).
  static std::string request_body(const CompletionRequest& req);
  /// Extracts choices[0].message.content; throws on malformed bodies.
  static std::string parse_response(const std::string& body);

 private:
  HttpConfig cfg_;
  std::string scheme_host_;
  std::string path_prefix_;
};

/// Deterministic stand-in for an LLM.
///  - question generation: a fixed-size numbered list derived from the rubric
///  - answers: a seeded hash of (essay_id, question_id), or, for essays with a
///    planted attribute a in [0, 1], 1 + [a >= t1] + [a >= t2] with per-question
///    thresholds t1 < t2
///  - direct scoring: a hashed score, or round(a * (max - min)) + min when planted
struct MockConfig {
  std::uint64_t seed = 0;
  int questions_per_rubric = 5;
  std::unordered_map<std::string, double> planted;  // essay_id -> attribute
};

class MockBackend final : public Backend {
 public:
  explicit MockBackend(MockConfig cfg) : cfg_(std::move(cfg)) {}
  std::string complete(const CompletionRequest& req) override;
  std::string name() const override { return "mock"; }

  /// The planted rating for a question, exposed so tests can check it.
  int planted_rating(double attribute, std::string_view question_id) const;

 private:
  MockConfig cfg_;
};

/// One file per key, written to a temp file and renamed into place. Each
/// entry embeds the SHA-256 of its response; a mismatch reads as a miss.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  std::optional<std::string> get(const std::string& key) const;
  void put(const std::string& key, const std::string& response) const;
  std::filesystem::path path_for(const std::string& key) const;
  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
};

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds base_delay{500};  // doubled after every failure
};

struct GatewayStats {
  std::size_t backend_calls = 0;
  std::size_t cache_hits = 0;
  std::size_t cache_misses = 0;
  std::size_t retries = 0;
  std::size_t corrupt_entries = 0;
  std::size_t peak_in_flight = 0;
};

/// The only path to an LLM: retries, caching and an in-flight bound.
class Gateway {
 public:
  Gateway(std::shared_ptr<Backend> backend, std::optional<ResponseCache> cache,
          std::size_t max_in_flight = 8, RetryPolicy retry = {});

  /// Backend call with retries; throws on empty responses.
  std::string complete(const CompletionRequest& req);
  /// Cached call: (text, cache_hit). With `refresh` the lookup is skipped and
  /// the entry overwritten.
  std::pair<std::string, bool> cached_complete(const CompletionRequest& req, bool refresh = false);

  GatewayStats stats() const;
  const Backend& backend() const { return *backend_; }
  std::size_t max_in_flight() const noexcept { return max_in_flight_; }

 private:
  std::shared_ptr<Backend> backend_;
  std::optional<ResponseCache> cache_;
  std::size_t max_in_flight_;
  RetryPolicy retry_;
  std::counting_semaphore<4096> slots_;
  std::atomic<std::size_t> calls_{0}, hits_{0}, misses_{0}, retries_{0}, corrupt_{0};
  std::atomic<std::size_t> in_flight_{0}, peak_{0};
};

}  // namespace trates::gateway
