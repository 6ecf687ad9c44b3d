#pragma once

#include <compare>
#include <span>
#include <string>
#include <vector>

#include "dialeval/corpus.hpp"
#include "dialeval/scorer.hpp"

namespace dialeval {

// Bot: one system per chatbot. BotPolarity: one per chatbot and emotional
// polarity of the scenario.
enum class Grouping { Bot, BotPolarity };

std::string_view to_string(Grouping g);
Grouping parse_grouping(std::string_view s);  // "bot" | "bot-polarity"

struct SystemKey {
  std::string bot_id;
  Polarity polarity = Polarity::Unspecified;

  std::string label() const;  // "GoodBot" or "GoodBot/positive"
  auto operator<=>(const SystemKey&) const = default;
};

struct SystemRating {
  SystemKey key;
  double mean = 0;
  std::size_t n = 0;
  double stddev = 0;  // sample standard deviation; 0 when n == 1

  friend bool operator==(const SystemRating&, const SystemRating&) = default;
};

struct AggregateResult {
  std::vector<SystemRating> ratings;  // sorted by key
  // Systems present in the corpus with no scored dialog.
  std::vector<std::string> empty_groups;
  // Group sizes differ; evaluation fairness expects equal counts.
  bool unequal_n = false;
  std::vector<std::string> warnings;
};

SystemKey system_key(const Dialog& dialog, const Corpus& corpus, Grouping grouping);

// s_j = sum(v) / N_j per group. Values are summed in sorted order so the
// result does not depend on input order. Throws LinkError for scores whose
// dialog is not in the corpus.
AggregateResult aggregate(std::span<const DialogScore> scores, const Corpus& corpus, Grouping grouping);

// Human-side ratings: overall labels of the corpus annotations through the
// same verbalizer and the same aggregation path.
std::vector<DialogScore> ground_truth_scores(const Corpus& corpus, const Verbalizer& verbalizer);
AggregateResult aggregate_ground_truth(const Corpus& corpus, const Verbalizer& verbalizer,
                                       Grouping grouping);

struct RankedSystem {
  SystemRating rating;
  std::size_t rank = 0;  // competition ranking: 1, 1, 3
  bool tied = false;
};

// Descending by mean; ties (equal up to rounding) share a rank and are ordered by key.
std::vector<RankedSystem> rank(std::span<const SystemRating> ratings);

// Aligned plain-text table.
std::string ranking_report(std::span<const RankedSystem> ranking, const std::string& title = {});
// One "rating" record per row in the canonical line format.
std::string ranking_records(std::span<const RankedSystem> ranking, const std::string& config_fingerprint);

}  // namespace dialeval
