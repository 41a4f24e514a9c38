#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "trates/gateway/gateway.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "trates/common/digest.hpp"
#include "trates/common/rng.hpp"

namespace trates::gateway {

namespace {

std::string env_or_empty(const char* name) {
  const char* v = std::getenv(name);
  return v ? v : "";
}

std::string meta(const CompletionRequest& req, const std::string& key) {
  auto it = req.metadata.find(key);
  return it == req.metadata.end() ? std::string() : it->second;
}

// Uniform in [0, 1) from a string key.
double unit_hash(std::uint64_t seed, std::string_view key) {
  return static_cast<double>(splitmix64(derive_seed(seed, key)) >> 11) * 0x1.0p-53;
}

}  // namespace

const std::string* CompletionRequest::substitution(std::string_view name) const {
  for (const auto& [k, v] : substitutions)
    if (k == name) return &v;
  return nullptr;
}

void CompletionRequest::validate() const {
  if (model_id.empty()) throw ValidationError("completion request without model_id");
  if (instruction.empty() || user_content.empty())
    throw ValidationError("completion request with empty instruction or user content");
  if (!(temperature >= 0)) throw ValidationError("temperature must be >= 0");
  if (max_tokens <= 0) throw ValidationError("max_tokens must be positive");
}

std::string cache_key(const CompletionRequest& req) {
  FieldDigest d;
  d.add(req.model_id);
  d.add(req.template_id);
  d.add(req.template_version);
  for (const auto& [k, v] : req.substitutions) {
    d.add(k);
    d.add(v);
  }
  return d.hex();
}

HttpConfig HttpConfig::from_env() {
  HttpConfig c;
  c.base_url = env_or_empty("TRATES_LLM_BASE_URL");
  c.api_key = env_or_empty("TRATES_LLM_API_KEY");
  if (c.base_url.empty())
    throw ValidationError("TRATES_LLM_BASE_URL is not set (OpenAI-compatible endpoint, e.g. http://host:8000/v1)");
  return c;
}

OpenAIBackend::OpenAIBackend(HttpConfig cfg) : cfg_(std::move(cfg)) {
  const auto scheme = cfg_.base_url.find("://");
  if (scheme == std::string::npos) throw ValidationError("base URL needs a scheme: " + cfg_.base_url);
  const auto path = cfg_.base_url.find('/', scheme + 3);
  scheme_host_ = cfg_.base_url.substr(0, path);
  path_prefix_ = path == std::string::npos ? "" : cfg_.base_url.substr(path);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

std::string OpenAIBackend::request_body(const CompletionRequest& req) {
  nlohmann::ordered_json body;
  body["model"] = req.model_id;
  body["messages"] = nlohmann::ordered_json::array(
      {{{"role", "system"}, {"content", req.instruction}},
       {{"role", "user"}, {"content", req.user_content}}});
  body["temperature"] = req.temperature;
  body["max_tokens"] = req.max_tokens;
  return body.dump();
}

std::string OpenAIBackend::parse_response(const std::string& body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("chat completion: invalid JSON: ") + e.what(), body);
  }
  try {
    const auto& content = j.at("choices").at(0).at("message").at("content");
    return content.is_null() ? std::string() : content.get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError("chat completion: no choices[0].message.content", body);
  }
}

std::string OpenAIBackend::complete(const CompletionRequest& req) {
  httplib::Client client(scheme_host_);
  const auto secs = static_cast<time_t>(cfg_.timeout.count());
  client.set_connection_timeout(secs, 0);
  client.set_read_timeout(secs, 0);
  client.set_write_timeout(secs, 0);
  httplib::Headers headers;
  if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);
  auto res = client.Post(path_prefix_ + "/chat/completions", headers, request_body(req),
                         "application/json");
  if (!res) throw TransientError("transport failure: " + httplib::to_string(res.error()));
  if (res->status == 429 || res->status >= 500)
    throw TransientError("backend status " + std::to_string(res->status));
  if (res->status != 200)
    throw Error("backend status " + std::to_string(res->status) + ": " + res->body.substr(0, 500));
  return parse_response(res->body);
}

int MockBackend::planted_rating(double a, std::string_view question_id) const {
  const std::string q(question_id);
  const double t1 = 0.15 + 0.3 * unit_hash(cfg_.seed, "t1|" + q);
  const double t2 = 0.55 + 0.3 * unit_hash(cfg_.seed, "t2|" + q);
  return 1 + (a >= t1 ? 1 : 0) + (a >= t2 ? 1 : 0);
}

std::string MockBackend::complete(const CompletionRequest& req) {
  const std::string kind = meta(req, "kind");
  if (kind == "generate") {
    const std::string* trait = req.substitution("trait");
    const std::string* rubric = req.substitution("rubric");
    const std::string tag = sha256_hex(rubric ? *rubric : req.user_content).substr(0, 8);
    std::ostringstream out;
    for (int i = 1; i <= cfg_.questions_per_rubric; ++i)
      out << i << "- How would you rate the " << (trait ? *trait : std::string("quality"))
          << " of the essay on rubric criterion " << i << " [" << tag << "]?\n";
    return out.str();
  }
  const std::string essay = meta(req, "essay_id");
  if (kind == "answer") {
    const std::string q = meta(req, "question_id");
    static constexpr const char* kLevels[] = {"Low", "Medium", "High"};
    if (auto it = cfg_.planted.find(essay); it != cfg_.planted.end())
      return kLevels[planted_rating(it->second, q) - 1];
    const double u = unit_hash(cfg_.seed, "answer|" + essay + "|" + q);
    return kLevels[static_cast<int>(u * 3.0)];
  }
  if (kind == "direct") {
    const double lo = std::stod(meta(req, "score_min"));
    const double hi = std::stod(meta(req, "score_max"));
    const double step = std::stod(meta(req, "score_step"));
    const double steps = std::round((hi - lo) / step);
    double idx;
    if (auto it = cfg_.planted.find(essay); it != cfg_.planted.end())
      idx = std::round(it->second * steps);
    else
      idx = std::floor(unit_hash(cfg_.seed, "score|" + essay + "|" + cache_key(req)) * (steps + 1));
    std::ostringstream out;
    out << "Score: " << lo + idx * step;
    return out.str();
  }
  throw Error("mock backend: request has no recognised kind ('" + kind + "')");
}

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path ResponseCache::path_for(const std::string& key) const {
  return dir_ / key.substr(0, 2) / (key + ".json");
}

std::optional<std::string> ResponseCache::get(const std::string& key) const {
  const auto p = path_for(key);
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    const auto j = nlohmann::json::parse(buf.str());
    const auto text = j.at("response").get<std::string>();
    if (j.at("key").get<std::string>() != key || j.at("sha256").get<std::string>() != sha256_hex(text))
      throw std::runtime_error("checksum mismatch");
    return text;
  } catch (const std::exception& e) {
    std::cerr << "warning: cache entry " << p.string() << " is corrupt (" << e.what()
              << "); recomputing\n";
    throw ParseError("corrupt cache entry");
  }
}

void ResponseCache::put(const std::string& key, const std::string& response) const {
  const auto p = path_for(key);
  std::filesystem::create_directories(p.parent_path());
  nlohmann::ordered_json j;
  j["key"] = key;
  j["sha256"] = sha256_hex(response);
  j["response"] = response;
  std::ostringstream tid;
  tid << std::this_thread::get_id();
  const auto tmp = p.parent_path() / (p.filename().string() + ".tmp." + tid.str());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write cache entry " + tmp.string());
    out << j.dump();
  }
  std::filesystem::rename(tmp, p);
}

Gateway::Gateway(std::shared_ptr<Backend> backend, std::optional<ResponseCache> cache,
                 std::size_t max_in_flight, RetryPolicy retry)
    : backend_(std::move(backend)),
      cache_(std::move(cache)),
      max_in_flight_(std::clamp<std::size_t>(max_in_flight, 1, 4096)),
      retry_(retry),
      slots_(static_cast<std::ptrdiff_t>(max_in_flight_)) {
  if (!backend_) throw ValidationError("gateway needs a backend");
}

std::string Gateway::complete(const CompletionRequest& req) {
  req.validate();
  auto delay = retry_.base_delay;
  for (int attempt = 0;; ++attempt) {
    std::string text;
    try {
      slots_.acquire();
      ++calls_;
      const std::size_t now = ++in_flight_;
      std::size_t peak = peak_.load();
      while (now > peak && !peak_.compare_exchange_weak(peak, now)) {
      }
      try {
        text = backend_->complete(req);
      } catch (...) {
        --in_flight_;
        slots_.release();
        throw;
      }
      --in_flight_;
      slots_.release();
    } catch (const TransientError& e) {
      if (attempt >= retry_.max_retries)
        throw Error("LLM call failed after " + std::to_string(attempt + 1) + " attempts: " + e.what());
      ++retries_;
      std::this_thread::sleep_for(delay);
      delay *= 2;
      continue;
    }
    bool blank = true;
    for (unsigned char c : text) blank = blank && std::isspace(c);
    if (blank) throw Error("empty response from " + backend_->name() + " for model " + req.model_id);
    return text;
  }
}

std::pair<std::string, bool> Gateway::cached_complete(const CompletionRequest& req, bool refresh) {
  if (!cache_) return {complete(req), false};
  const std::string key = cache_key(req);
  if (!refresh) {
    try {
      if (auto hit = cache_->get(key)) {
        ++hits_;
        return {*hit, true};
      }
    } catch (const ParseError&) {
      ++corrupt_;
    }
  }
  ++misses_;
  std::string text = complete(req);
  cache_->put(key, text);
  return {text, false};
}

GatewayStats Gateway::stats() const {
  return {calls_.load(), hits_.load(), misses_.load(), retries_.load(), corrupt_.load(), peak_.load()};
}

}  // namespace trates::gateway
