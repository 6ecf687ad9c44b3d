#include "dialeval/playengine.hpp"

#include <atomic>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

#include "dialeval/errors.hpp"
#include "dialeval/promptkit.hpp"
#include "dialeval/text.hpp"

namespace dialeval {

using ojson = nlohmann::ordered_json;

SessionError::SessionError(std::string cause_kind, const std::string& message, Dialog partial,
                           std::string prompt)
    : Error("SessionError", message),
      cause_kind_(std::move(cause_kind)),
      partial_(std::move(partial)),
      prompt_(std::move(prompt)) {}

std::string session_dialog_id(const std::string& scenario_id, const std::string& bot_id) {
  return scenario_id + "__" + bot_id;
}

std::string normalize_speaker_completion(std::string_view completion) {
  std::string t = text::normalize(completion);
  constexpr std::string_view cue = "Speaker:";
  if (text::starts_with(t, cue)) t = text::normalize(t.substr(cue.size()));
  return t;
}

Dialog run_session(const Scenario& scenario, Bot& bot, CompletionProvider& provider,
                   const SessionConfig& config) {
  if (config.turns_per_side < 1) throw ConfigError("turns_per_side must be >= 1");
  Dialog d;
  d.dialog_id = session_dialog_id(scenario.scenario_id, bot.id());
  d.scenario_id = scenario.scenario_id;
  d.bot_id = bot.id();
  d.source = Source::Synthetic;

  if (text::normalize(scenario.opener_text).empty()) {
    throw SessionError("TemplateError", "scenario '" + scenario.scenario_id + "' has no opener", d);
  }
  d.append(Role::Speaker, scenario.opener_text);

  for (int round = 1; round <= config.turns_per_side; ++round) {
    try {
      d.append(Role::Listener, bot.respond(BotTurnRequest{d.turns, scenario.scenario_id}));
    } catch (const Error& e) {
      throw SessionError(e.kind(),
                         "bot '" + bot.id() + "' failed at turn " + std::to_string(d.turns.size()) +
                             " of '" + d.dialog_id + "': " + e.what(),
                         d);
    }
    if (round == config.turns_per_side) break;

    const std::string prompt = render_play_prompt(scenario, d.turns);
    CompletionResponse response;
    try {
      response = provider.complete(
          CompletionRequest{prompt, config.max_tokens, config.temperature, config.stop});
    } catch (const Error& e) {
      throw SessionError(e.kind(),
                         "provider failed at turn " + std::to_string(d.turns.size()) + " of '" +
                             d.dialog_id + "': " + e.what(),
                         d);
    }
    std::string speaker = normalize_speaker_completion(response.text);
    if (speaker.empty()) {
      throw SessionError("DegenerateTurn",
                         "empty speaker completion at turn " + std::to_string(d.turns.size()) +
                             " of '" + d.dialog_id + "'",
                         d, prompt);
    }
    d.append(Role::Speaker, speaker);
  }
  return d;
}

void BatchResult::require_balanced() const {
  if (!unbalanced) return;
  std::string counts;
  for (const auto& [bot, n] : per_bot_counts) {
    counts += (counts.empty() ? "" : ", ") + bot + "=" + std::to_string(n);
  }
  throw UnbalancedRun("per-bot dialog counts differ (" + counts + "); " +
                      std::to_string(failures.size()) + " failed session(s)");
}

BatchResult run_batch(const BatchPlan& plan, const std::map<std::string, Scenario>& scenarios,
                      const std::map<std::string, BotPtr>& bots, CompletionProvider& provider,
                      const BatchOptions& options) {
  if (plan.scenario_ids.empty() || plan.bot_ids.empty()) throw ConfigError("batch plan is empty");
  std::set<std::string> unique_scenarios(plan.scenario_ids.begin(), plan.scenario_ids.end());
  std::set<std::string> unique_bots(plan.bot_ids.begin(), plan.bot_ids.end());
  if (unique_scenarios.size() != plan.scenario_ids.size()) throw ConfigError("batch plan repeats a scenario");
  if (unique_bots.size() != plan.bot_ids.size()) throw ConfigError("batch plan repeats a bot");

  BatchResult result;
  for (const auto& sid : plan.scenario_ids) {
    auto it = scenarios.find(sid);
    if (it == scenarios.end()) throw LinkError("batch plan names unknown scenario '" + sid + "'");
    result.corpus.scenarios.emplace(sid, it->second);
  }
  for (const auto& bid : plan.bot_ids) {
    if (!bots.count(bid)) throw LinkError("batch plan names unknown bot '" + bid + "'");
    result.per_bot_counts[bid] = 0;
  }

  struct Job {
    const Scenario* scenario;
    Bot* bot;
  };
  std::vector<Job> jobs;
  for (const auto& sid : plan.scenario_ids) {
    for (const auto& bid : plan.bot_ids) {
      if (options.existing.count(session_dialog_id(sid, bid))) continue;
      jobs.push_back({&result.corpus.scenarios.at(sid), bots.at(bid).get()});
    }
  }

  std::vector<std::optional<Dialog>> dialogs(jobs.size());
  std::vector<std::optional<SessionFailure>> failures(jobs.size());
  std::mutex callback_mu;
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const auto& job = jobs[i];
      try {
        dialogs[i] = run_session(*job.scenario, *job.bot, provider, plan.session);
        if (options.on_session) {
          std::lock_guard lock(callback_mu);
          options.on_session(*dialogs[i]);
        }
      } catch (const SessionError& e) {
        failures[i] = SessionFailure{job.scenario->scenario_id, job.bot->id(), e.cause_kind(), e.what()};
      } catch (const Error& e) {
        failures[i] = SessionFailure{job.scenario->scenario_id, job.bot->id(), e.kind(), e.what()};
      }
    }
  };

  const int threads = std::max(1, std::min<int>(options.concurrency, static_cast<int>(jobs.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (const auto& [id, d] : options.existing) {
    if (unique_scenarios.count(d.scenario_id) && unique_bots.count(d.bot_id)) {
      result.corpus.dialogs.emplace(id, d);
    }
  }
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (dialogs[i]) result.corpus.dialogs.emplace(dialogs[i]->dialog_id, std::move(*dialogs[i]));
    if (failures[i]) result.failures.push_back(std::move(*failures[i]));
  }
  for (const auto& [_, d] : result.corpus.dialogs) ++result.per_bot_counts[d.bot_id];

  std::set<std::size_t> counts;
  for (const auto& [_, n] : result.per_bot_counts) counts.insert(n);
  result.unbalanced = counts.size() > 1;
  return result;
}

std::string batch_manifest(const BatchPlan& plan, const BatchResult& result,
                           const std::string& provider_fingerprint) {
  ojson m;
  m["kind"] = "manifest";
  m["run_id"] = plan.run_id;
  m["provider"] = provider_fingerprint;
  m["scenarios"] = plan.scenario_ids;
  m["bots"] = plan.bot_ids;
  m["session"] = {{"turns_per_side", plan.session.turns_per_side},
                  {"max_tokens", plan.session.max_tokens},
                  {"temperature", plan.session.temperature},
                  {"stop", plan.session.stop}};
  ojson counts = ojson::object();
  for (const auto& [bot, n] : result.per_bot_counts) counts[bot] = n;
  m["per_bot_counts"] = std::move(counts);
  m["dialogs"] = result.corpus.dialogs.size();
  ojson fails = ojson::array();
  for (const auto& f : result.failures) {
    fails.push_back({{"scenario_id", f.scenario_id}, {"bot_id", f.bot_id}, {"kind", f.kind},
                     {"message", f.message}});
  }
  m["failures"] = std::move(fails);
  m["status"] = result.unbalanced ? "unbalanced" : (result.failures.empty() ? "ok" : "balanced-with-failures");
  return m.dump(2) + "\n";
}

}  // namespace dialeval
