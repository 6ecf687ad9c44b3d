#include "dialeval/providers.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "dialeval/errors.hpp"
#include "dialeval/text.hpp"

namespace dialeval {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string_view to_string(FinishReason r) {
  switch (r) {
    case FinishReason::Stop: return "stop";
    case FinishReason::Length: return "length";
    case FinishReason::Other: break;
  }
  return "other";
}

void validate_request(const CompletionRequest& request) {
  if (request.prompt.empty()) throw ConfigError("completion prompt is empty");
  if (request.max_tokens <= 0) throw ConfigError("max_tokens must be positive");
  if (!(request.temperature >= 0)) throw ConfigError("temperature must be >= 0");
  if (request.stop.size() > 4) throw ConfigError("at most 4 stop sequences are allowed");
}

bool truncate_at_stop(std::string& text, const std::vector<std::string>& stop) {
  std::size_t cut = std::string::npos;
  for (const auto& s : stop) {
    if (s.empty()) continue;
    cut = std::min(cut, text.find(s));
  }
  if (cut == std::string::npos) return false;
  text.resize(cut);
  return true;
}

std::chrono::milliseconds RetryPolicy::backoff_before(int attempt) const {
  if (attempt <= 1) return std::chrono::milliseconds{0};
  auto delay = base_backoff;
  for (int i = 2; i < attempt && delay < max_backoff; ++i) delay *= 2;
  return std::min(delay, max_backoff);
}

// ---------------------------------------------------------------------------
// HTTP

namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string base_path;
};

ParsedUrl parse_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint '" + url + "' lacks a scheme");
  auto path_start = url.find('/', scheme_end + 3);
  ParsedUrl p;
  p.origin = url.substr(0, path_start);
  p.base_path = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!p.base_path.empty() && p.base_path.back() == '/') p.base_path.pop_back();
  return p;
}

class HttpCompletionProvider : public CompletionProvider {
 public:
  explicit HttpCompletionProvider(ProviderConfig config)
      : config_(std::move(config)), url_(parse_url(config_.endpoint)) {
    if (config_.retry.max_attempts < 1) throw ConfigError("retry.max_attempts must be >= 1");
    if (config_.model.empty()) throw ConfigError("provider model is empty");
  }

  CompletionResponse complete(const CompletionRequest& request) override {
    validate_request(request);

    httplib::Headers headers;
    if (!config_.credential_env.empty()) {
      const char* token = std::getenv(config_.credential_env.c_str());
      if (!token || !*token) {
        throw AuthError("credential variable " + config_.credential_env + " is not set");
      }
      headers.emplace("Authorization", std::string("Bearer ") + token);
    }

    ojson body;
    body["model"] = config_.model;
    body["prompt"] = request.prompt;
    body["max_tokens"] = request.max_tokens;
    body["temperature"] = request.temperature;
    body["stop"] = request.stop;
    const std::string payload = body.dump();

    std::string last_error;
    for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
      if (attempt > 1) std::this_thread::sleep_for(config_.retry.backoff_before(attempt));

      httplib::Client client(url_.origin);
      auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
      auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
      client.set_connection_timeout(secs.count(), usecs.count());
      client.set_read_timeout(secs.count(), usecs.count());
      client.set_write_timeout(secs.count(), usecs.count());

      auto res = client.Post(url_.base_path + "/completions", headers, payload, "application/json");
      if (!res) {
        last_error = "transport failure: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status == 401 || res->status == 403) {
        throw AuthError("backend rejected credentials (HTTP " + std::to_string(res->status) + ")");
      }
      if (res->status == 429 || res->status >= 500) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status < 200 || res->status >= 300) {
        throw ProtocolError("HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 512));
      }
      auto out = parse_body(res->body);
      out.attempts = attempt;
      truncate_at_stop(out.text, request.stop);
      return out;
    }
    throw TransportError(last_error + " after " + std::to_string(config_.retry.max_attempts) +
                             " attempt(s)",
                         config_.retry.max_attempts);
  }

  std::string fingerprint() const override { return "http:" + config_.model + "@" + config_.endpoint; }

 private:
  static CompletionResponse parse_body(const std::string& body) {
    CompletionResponse out;
    out.raw = body;
    try {
      json j = json::parse(body);
      const auto& choice = j.at("choices").at(0);
      out.text = choice.at("text").get<std::string>();
      std::string reason =
          choice.contains("finish_reason") && choice["finish_reason"].is_string()
              ? choice["finish_reason"].get<std::string>()
              : "";
      out.finish_reason = reason == "stop"     ? FinishReason::Stop
                          : reason == "length" ? FinishReason::Length
                                               : FinishReason::Other;
    } catch (const json::exception& e) {
      throw ProtocolError(std::string("unparsable completion payload: ") + e.what());
    }
    return out;
  }

  ProviderConfig config_;
  ParsedUrl url_;
};

}  // namespace

ProviderPtr http_provider(const ProviderConfig& config) {
  ProviderPtr p = std::make_shared<HttpCompletionProvider>(config);
  if (config.rate_limit) p = with_rate_limit(std::move(p), *config.rate_limit);
  return p;
}

// ---------------------------------------------------------------------------
// Scripted

ScriptedProvider::ScriptedProvider(std::vector<std::string> script, std::vector<std::string> matchers)
    : script_(std::move(script)), matchers_(std::move(matchers)) {
  if (script_.empty()) throw ConfigError("scripted provider needs a non-empty script");
}

CompletionResponse ScriptedProvider::complete(const CompletionRequest& request) {
  validate_request(request);
  std::lock_guard lock(mu_);
  const std::size_t call = cursor_ + 1;
  if (cursor_ >= script_.size()) throw ScriptExhausted(call);
  if (cursor_ < matchers_.size() && !matchers_[cursor_].empty() &&
      request.prompt.find(matchers_[cursor_]) == std::string::npos) {
    throw PromptMismatch(call, matchers_[cursor_], request.prompt);
  }
  prompts_.push_back(request.prompt);
  CompletionResponse out;
  out.text = script_[cursor_++];
  out.raw = out.text;
  truncate_at_stop(out.text, request.stop);
  out.finish_reason = FinishReason::Stop;
  return out;
}

std::string ScriptedProvider::fingerprint() const {
  std::string all;
  for (const auto& s : script_) all += s + '\x1f';
  return "scripted:" + std::to_string(script_.size()) + ":" + text::fnv1a_hex(all).substr(0, 8);
}

std::size_t ScriptedProvider::calls() const {
  std::lock_guard lock(mu_);
  return cursor_;
}

std::size_t ScriptedProvider::remaining() const {
  std::lock_guard lock(mu_);
  return script_.size() - cursor_;
}

std::vector<std::string> ScriptedProvider::prompts() const {
  std::lock_guard lock(mu_);
  return prompts_;
}

std::shared_ptr<ScriptedProvider> scripted_provider(std::vector<std::string> script,
                                                    std::vector<std::string> matchers) {
  return std::make_shared<ScriptedProvider>(std::move(script), std::move(matchers));
}

// ---------------------------------------------------------------------------
// Rate limiting

TokenBucket::TokenBucket(double rate) : rate_(rate), capacity_(std::max(1.0, rate)), last_(Clock::now()) {
  if (!(rate > 0)) throw ConfigError("rate limit must be > 0");
}

void TokenBucket::acquire() {
  std::chrono::duration<double> wait{0};
  {
    std::lock_guard lock(mu_);
    auto now = Clock::now();
    double elapsed = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    tokens_ = std::min(capacity_, tokens_ + elapsed * rate_);
    tokens_ -= 1.0;
    // A negative balance is a reservation: this caller owns the slot that
    // frees up after -tokens_/rate seconds.
    if (tokens_ < 0) wait = std::chrono::duration<double>(-tokens_ / rate_);
  }
  if (wait.count() > 0) std::this_thread::sleep_for(wait);
}

namespace {

class RateLimitedProvider : public CompletionProvider {
 public:
  RateLimitedProvider(ProviderPtr inner, double rate) : inner_(std::move(inner)), bucket_(rate) {}

  CompletionResponse complete(const CompletionRequest& request) override {
    bucket_.acquire();
    return inner_->complete(request);
  }
  std::string fingerprint() const override { return inner_->fingerprint(); }

 private:
  ProviderPtr inner_;
  TokenBucket bucket_;
};

class AuditingProvider : public CompletionProvider {
 public:
  AuditingProvider(ProviderPtr inner, std::shared_ptr<AuditLog> log)
      : inner_(std::move(inner)), log_(std::move(log)) {}

  CompletionResponse complete(const CompletionRequest& request) override {
    auto response = inner_->complete(request);
    log_->record(request, response);
    return response;
  }
  std::string fingerprint() const override { return inner_->fingerprint(); }

 private:
  ProviderPtr inner_;
  std::shared_ptr<AuditLog> log_;
};

}  // namespace

ProviderPtr with_rate_limit(ProviderPtr inner, double rate) {
  return std::make_shared<RateLimitedProvider>(std::move(inner), rate);
}

ProviderPtr with_audit_log(ProviderPtr inner, std::shared_ptr<AuditLog> log) {
  if (!log) throw ConfigError("audit log is null");
  return std::make_shared<AuditingProvider>(std::move(inner), std::move(log));
}

AuditLog::AuditLog(const std::filesystem::path& path) {
  file_.emplace(path, std::ios::binary | std::ios::app);
  if (!*file_) throw IoError("cannot open audit log '" + path.string() + "'");
}

void AuditLog::record(const CompletionRequest& request, const CompletionResponse& response) {
  ojson o;
  o["kind"] = "audit";
  o["prompt"] = request.prompt;
  o["max_tokens"] = request.max_tokens;
  o["temperature"] = request.temperature;
  o["stop"] = request.stop;
  o["text"] = response.text;
  o["finish_reason"] = to_string(response.finish_reason);
  o["attempts"] = response.attempts;
  o["raw"] = response.raw;
  std::string line = o.dump();
  std::lock_guard lock(mu_);
  if (file_) {
    *file_ << line << '\n';
    file_->flush();
  }
  lines_.push_back(std::move(line));
}

std::size_t AuditLog::size() const {
  std::lock_guard lock(mu_);
  return lines_.size();
}

std::vector<std::string> AuditLog::lines() const {
  std::lock_guard lock(mu_);
  return lines_;
}

}  // namespace dialeval
