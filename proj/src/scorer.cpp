#include "dialeval/scorer.hpp"

#include <algorithm>
#include <cctype>
#include <atomic>
#include <optional>
#include <set>
#include <thread>

#include "dialeval/errors.hpp"
#include "dialeval/text.hpp"

namespace dialeval {

double Verbalizer::operator()(const std::string& label) const {
  auto i = scale_.index_of(label);
  if (!i) throw UnknownLabel("'" + label + "' is not a label of scale '" + scale_.name() + "'");
  return scale_.values()[*i];
}

std::string Verbalizer::invert(double value) const {
  auto l = scale_.label_for(value);
  if (!l) throw UnknownLabel(std::to_string(value) + " is not a value of scale '" + scale_.name() + "'");
  return *l;
}

double verbalize(const std::string& label, const Verbalizer& verbalizer) { return verbalizer(label); }

namespace {

bool is_word_char(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

std::string normalize_completion(std::string_view completion) {
  std::string t = text::normalize(completion);
  while (!t.empty() && std::ispunct(static_cast<unsigned char>(t.back()))) t.pop_back();
  return text::casefold(text::trim(t));
}

}  // namespace

std::string parse_label(std::string_view completion, const ScoreScale& scale) {
  const std::string norm = normalize_completion(completion);

  std::vector<std::size_t> order(scale.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scale.labels()[a].size() > scale.labels()[b].size();
  });

  std::vector<bool> claimed(norm.size(), false);
  std::set<std::size_t> found;
  for (std::size_t idx : order) {
    const std::string needle = text::casefold(text::normalize(scale.labels()[idx]));
    for (auto pos = norm.find(needle); pos != std::string::npos; pos = norm.find(needle, pos + 1)) {
      const std::size_t end = pos + needle.size();
      if (pos > 0 && is_word_char(norm[pos - 1])) continue;
      if (end < norm.size() && is_word_char(norm[end])) continue;
      if (std::any_of(claimed.begin() + pos, claimed.begin() + end, [](bool b) { return b; })) continue;
      std::fill(claimed.begin() + pos, claimed.begin() + end, true);
      found.insert(idx);
    }
  }
  if (found.empty()) {
    throw UnparsableCompletion("no label of scale '" + scale.name() + "' in completion \"" +
                               std::string(completion) + "\"");
  }
  if (found.size() > 1) {
    std::string names;
    for (auto i : found) names += (names.empty() ? "" : ", ") + scale.labels()[i];
    throw AmbiguousCompletion("completion \"" + std::string(completion) + "\" names several labels: " + names);
  }
  return scale.labels()[*found.begin()];
}

ScoringError::ScoringError(std::string dialog_id, std::string cause_kind, const std::string& message)
    : Error("ScoringError", dialog_id + ": " + message),
      dialog_id_(std::move(dialog_id)),
      cause_kind_(std::move(cause_kind)) {}

DialogScore score_dialog(const Dialog& dialog, const Scenario& scenario, const PromptConfig& config,
                         const Banks& banks, CompletionProvider& provider,
                         const ScoringOptions& options) {
  try {
    const std::string cloze = render_eval_prompt(dialog, scenario, config, banks);
    if (text::count_occurrences(cloze, kMaskToken) != 1) {
      throw TemplateError("evaluation prompt must contain exactly one mask token");
    }
    CompletionRequest request{render_eval_completion_prompt(dialog, scenario, config, banks),
                              options.max_tokens, options.temperature, options.stop};
    const Verbalizer verbalizer(config.scale);

    auto response = provider.complete(request);
    std::string label;
    try {
      label = parse_label(response.text, config.scale);
    } catch (const UnparsableCompletion&) {
      if (options.policy != ParsePolicy::RetryOnce) throw;
      request.temperature = 0.0;
      response = provider.complete(request);
      label = parse_label(response.text, config.scale);
    } catch (const AmbiguousCompletion&) {
      if (options.policy != ParsePolicy::RetryOnce) throw;
      request.temperature = 0.0;
      response = provider.complete(request);
      label = parse_label(response.text, config.scale);
    }
    return DialogScore{dialog.dialog_id, label, verbalize(label, verbalizer), response.text,
                       config.fingerprint()};
  } catch (const ScoringError&) {
    throw;
  } catch (const Error& e) {
    throw ScoringError(dialog.dialog_id, e.kind(), e.what());
  }
}

ScoreRun score_dialogs(std::span<const Dialog> dialogs, const Corpus& corpus,
                       const PromptConfig& config, const Banks& banks,
                       CompletionProvider& provider, const ScoringOptions& options) {
  std::vector<const Dialog*> ordered;
  std::set<std::string> ids;
  for (const auto& d : dialogs) {
    if (!ids.insert(d.dialog_id).second) throw SchemaError("duplicate dialog id '" + d.dialog_id + "'");
    ordered.push_back(&d);
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const Dialog* a, const Dialog* b) { return a->dialog_id < b->dialog_id; });

  std::vector<std::optional<DialogScore>> scores(ordered.size());
  std::vector<std::optional<ScoringFailure>> failures(ordered.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < ordered.size(); i = next++) {
      const Dialog& d = *ordered[i];
      try {
        scores[i] = score_dialog(d, corpus.scenario_of(d), config, banks, provider, options);
      } catch (const ScoringError& e) {
        failures[i] = ScoringFailure{d.dialog_id, e.cause_kind(), e.what()};
      } catch (const Error& e) {
        failures[i] = ScoringFailure{d.dialog_id, e.kind(), e.what()};
      }
    }
  };
  const int threads = std::max(1, std::min<int>(options.concurrency, static_cast<int>(ordered.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  ScoreRun run;
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    if (scores[i]) run.scores.push_back(std::move(*scores[i]));
    if (failures[i]) run.failures.push_back(std::move(*failures[i]));
  }
  return run;
}

ScoreRun score_corpus(const Corpus& corpus, const PromptConfig& config, const Banks& banks,
                      CompletionProvider& provider, const ScoringOptions& options) {
  std::vector<Dialog> dialogs;
  dialogs.reserve(corpus.dialogs.size());
  for (const auto& [_, d] : corpus.dialogs) dialogs.push_back(d);
  return score_dialogs(dialogs, corpus, config, banks, provider, options);
}

}  // namespace dialeval
