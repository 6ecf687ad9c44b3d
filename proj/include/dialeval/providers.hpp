#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace dialeval {

struct CompletionRequest {
  std::string prompt;
  int max_tokens = 16;
  double temperature = 0.0;
  std::vector<std::string> stop;  // at most 4
};

enum class FinishReason { Stop, Length, Other };

struct CompletionResponse {
  std::string text;
  FinishReason finish_reason = FinishReason::Stop;
  std::string raw;    // backend payload, kept for audit
  int attempts = 1;   // dispatches it took, retries included
};

// Throws ConfigError when the request breaks its invariants.
void validate_request(const CompletionRequest& request);

// Cuts `text` at the earliest occurrence of any stop sequence.
// Returns true if a stop sequence was found.
bool truncate_at_stop(std::string& text, const std::vector<std::string>& stop);

class CompletionProvider {
 public:
  virtual ~CompletionProvider() = default;
  virtual CompletionResponse complete(const CompletionRequest& request) = 0;
  // Identifies the backend in run manifests.
  virtual std::string fingerprint() const = 0;
};

using ProviderPtr = std::shared_ptr<CompletionProvider>;

// Defaults are not taken from any published setup; every field is configurable.
struct DecodingParams {
  int max_tokens;
  double temperature;
};
inline constexpr DecodingParams kPlayDecoding{150, 0.7};
inline constexpr DecodingParams kScoreDecoding{8, 0.0};

struct RetryPolicy {
  int max_attempts = 4;
  std::chrono::milliseconds base_backoff{500};
  std::chrono::milliseconds max_backoff{20000};

  // Delay before attempt `attempt` (2-based: the first retry).
  std::chrono::milliseconds backoff_before(int attempt) const;
};

struct ProviderConfig {
  std::string endpoint = "https://api.openai.com/v1";
  std::string model = "gpt-3.5-turbo-instruct";
  // Environment variable holding the bearer token. Empty: send no credential.
  std::string credential_env = "OPENAI_API_KEY";
  std::chrono::milliseconds timeout{60000};
  RetryPolicy retry;
  // Requests per second; nullopt disables limiting.
  std::optional<double> rate_limit;
};

// POST {endpoint}/completions speaking the legacy completions wire format.
// Retries timeouts, 5xx and 429 per the policy; 401/403 raise AuthError at
// once; a 2xx body that cannot be parsed raises ProtocolError without retry.
ProviderPtr http_provider(const ProviderConfig& config);

// Replies with `script` entries in global call order. When `matchers` is
// given, call i requires the prompt to contain matchers[i] (empty = any).
class ScriptedProvider : public CompletionProvider {
 public:
  explicit ScriptedProvider(std::vector<std::string> script,
                            std::vector<std::string> matchers = {});

  CompletionResponse complete(const CompletionRequest& request) override;
  std::string fingerprint() const override;

  std::size_t calls() const;
  std::size_t remaining() const;
  std::vector<std::string> prompts() const;

 private:
  mutable std::mutex mu_;
  std::vector<std::string> script_;
  std::vector<std::string> matchers_;
  std::vector<std::string> prompts_;
  std::size_t cursor_ = 0;
};

std::shared_ptr<ScriptedProvider> scripted_provider(std::vector<std::string> script,
                                                    std::vector<std::string> matchers = {});

// Token bucket admitting at most `rate` acquisitions per second. Capacity is
// one second of tokens, but a fresh bucket holds a single token so a cold
// burst is paced from the first request on.
class TokenBucket {
 public:
  explicit TokenBucket(double rate);
  void acquire();
  double rate() const noexcept { return rate_; }

 private:
  using Clock = std::chrono::steady_clock;
  std::mutex mu_;
  double rate_;
  double capacity_;
  double tokens_ = 1.0;
  Clock::time_point last_;
};

ProviderPtr with_rate_limit(ProviderPtr inner, double rate);

// Append-only JSON-lines log of successful request/response pairs.
class AuditLog {
 public:
  AuditLog() = default;  // in-memory only
  explicit AuditLog(const std::filesystem::path& path);

  void record(const CompletionRequest& request, const CompletionResponse& response);
  std::size_t size() const;
  std::vector<std::string> lines() const;

 private:
  mutable std::mutex mu_;
  std::vector<std::string> lines_;
  std::optional<std::ofstream> file_;
};

ProviderPtr with_audit_log(ProviderPtr inner, std::shared_ptr<AuditLog> log);

std::string_view to_string(FinishReason r);

}  // namespace dialeval
