#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "dialeval/botbridge.hpp"
#include "dialeval/corpus.hpp"
#include "dialeval/errors.hpp"
#include "dialeval/providers.hpp"

namespace dialeval {

struct SessionConfig {
  int turns_per_side = 3;  // K: the session has 2K turns
  int max_tokens = kPlayDecoding.max_tokens;
  double temperature = kPlayDecoding.temperature;
  std::vector<std::string> stop = {"\nListener:", "\nSpeaker:"};
};

// Why a session stopped early, with the transcript collected so far.
class SessionError : public Error {
 public:
  SessionError(std::string cause_kind, const std::string& message, Dialog partial,
               std::string prompt = {});
  const std::string& cause_kind() const noexcept { return cause_kind_; }
  const Dialog& partial() const noexcept { return partial_; }
  // The play prompt that produced a degenerate turn, if any.
  const std::string& prompt() const noexcept { return prompt_; }

 private:
  std::string cause_kind_;
  Dialog partial_;
  std::string prompt_;
};

std::string session_dialog_id(const std::string& scenario_id, const std::string& bot_id);

// Trims the completion and strips a leading "Speaker:" echo.
std::string normalize_speaker_completion(std::string_view completion);

// Opener as turn 0, then bot reply / prompted speaker turn until 2K turns;
// the bot speaks last. Throws SessionError.
Dialog run_session(const Scenario& scenario, Bot& bot, CompletionProvider& provider,
                   const SessionConfig& config);

struct BatchPlan {
  std::vector<std::string> scenario_ids;
  std::vector<std::string> bot_ids;
  SessionConfig session;
  std::string run_id = "run";
};

struct SessionFailure {
  std::string scenario_id;
  std::string bot_id;
  std::string kind;
  std::string message;
};

struct BatchOptions {
  int concurrency = 1;
  // Called under a lock after every completed session, in completion order.
  std::function<void(const Dialog&)> on_session;
  // Pairs already present (resume): they are neither run nor failed.
  std::map<std::string, Dialog> existing;
};

struct BatchResult {
  Corpus corpus;  // scenarios of the plan plus every successful dialog
  std::vector<SessionFailure> failures;
  std::map<std::string, std::size_t> per_bot_counts;
  bool unbalanced = false;

  // Throws UnbalancedRun when per-bot dialog counts differ.
  void require_balanced() const;
};

// Runs every (scenario, bot) pair of the plan exactly once.
BatchResult run_batch(const BatchPlan& plan, const std::map<std::string, Scenario>& scenarios,
                      const std::map<std::string, BotPtr>& bots, CompletionProvider& provider,
                      const BatchOptions& options = {});

// Machine-readable run manifest (JSON object text).
std::string batch_manifest(const BatchPlan& plan, const BatchResult& result,
                           const std::string& provider_fingerprint);

}  // namespace dialeval
