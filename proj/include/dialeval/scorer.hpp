#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dialeval/corpus.hpp"
#include "dialeval/errors.hpp"
#include "dialeval/promptkit.hpp"
#include "dialeval/providers.hpp"

namespace dialeval {

// Maps rating labels to numbers through the scale's injective map.
class Verbalizer {
 public:
  explicit Verbalizer(ScoreScale scale) : scale_(std::move(scale)) {}
  const ScoreScale& scale() const noexcept { return scale_; }

  double operator()(const std::string& label) const;  // throws UnknownLabel
  std::string invert(double value) const;             // throws UnknownLabel

 private:
  ScoreScale scale_;
};

// Normalizes the completion (trim, strip trailing punctuation, case-fold) and
// matches scale labels longest first as whole words, so "very bad" is
// "Very bad" rather than "Bad". Throws UnparsableCompletion when nothing
// matches and AmbiguousCompletion when two labels occur apart.
std::string parse_label(std::string_view completion, const ScoreScale& scale);

double verbalize(const std::string& label, const Verbalizer& verbalizer);

enum class ParsePolicy { Strict, RetryOnce };

struct ScoringOptions {
  ParsePolicy policy = ParsePolicy::Strict;
  int max_tokens = kScoreDecoding.max_tokens;
  double temperature = kScoreDecoding.temperature;
  std::vector<std::string> stop = {".", "\n"};
  int concurrency = 1;
};

// A scoring failure tagged with the dialog it belongs to.
class ScoringError : public Error {
 public:
  ScoringError(std::string dialog_id, std::string cause_kind, const std::string& message);
  const std::string& dialog_id() const noexcept { return dialog_id_; }
  const std::string& cause_kind() const noexcept { return cause_kind_; }

 private:
  std::string dialog_id_;
  std::string cause_kind_;
};

// Renders P(d), checks the single mask, requests a completion of the prefix
// form, parses the label and verbalizes it.
DialogScore score_dialog(const Dialog& dialog, const Scenario& scenario, const PromptConfig& config,
                         const Banks& banks, CompletionProvider& provider,
                         const ScoringOptions& options = {});

struct ScoringFailure {
  std::string dialog_id;
  std::string kind;
  std::string message;
};

struct ScoreRun {
  std::vector<DialogScore> scores;  // ordered by dialog_id
  std::vector<ScoringFailure> failures;
};

// Dialogs must carry distinct ids (SchemaError otherwise). Failures are
// collected, never thrown; under Strict the caller aborts on any failure.
ScoreRun score_dialogs(std::span<const Dialog> dialogs, const Corpus& corpus,
                       const PromptConfig& config, const Banks& banks,
                       CompletionProvider& provider, const ScoringOptions& options = {});

ScoreRun score_corpus(const Corpus& corpus, const PromptConfig& config, const Banks& banks,
                      CompletionProvider& provider, const ScoringOptions& options = {});

}  // namespace dialeval
