#include "dialeval/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include <json.hpp>

#include "dialeval/errors.hpp"

namespace dialeval {

using ojson = nlohmann::ordered_json;

std::string_view to_string(Grouping g) { return g == Grouping::Bot ? "bot" : "bot-polarity"; }

Grouping parse_grouping(std::string_view s) {
  if (s == "bot") return Grouping::Bot;
  if (s == "bot-polarity") return Grouping::BotPolarity;
  throw ConfigError("unknown grouping '" + std::string(s) + "' (expected bot or bot-polarity)");
}

std::string SystemKey::label() const {
  if (polarity == Polarity::Unspecified) return bot_id;
  return bot_id + "/" + std::string(to_string(polarity));
}

SystemKey system_key(const Dialog& dialog, const Corpus& corpus, Grouping grouping) {
  SystemKey k{dialog.bot_id, Polarity::Unspecified};
  if (grouping == Grouping::BotPolarity) k.polarity = corpus.scenario_of(dialog).polarity;
  return k;
}

AggregateResult aggregate(std::span<const DialogScore> scores, const Corpus& corpus, Grouping grouping) {
  std::map<SystemKey, std::vector<double>> groups;
  std::set<std::string> seen;
  for (const auto& s : scores) {
    auto it = corpus.dialogs.find(s.dialog_id);
    if (it == corpus.dialogs.end()) throw LinkError("score for unknown dialog '" + s.dialog_id + "'");
    if (!seen.insert(s.dialog_id).second) {
      throw SchemaError("dialog '" + s.dialog_id + "' scored more than once in one aggregation");
    }
    groups[system_key(it->second, corpus, grouping)].push_back(s.value);
  }

  AggregateResult out;
  std::set<SystemKey> expected;
  for (const auto& [_, d] : corpus.dialogs) expected.insert(system_key(d, corpus, grouping));
  for (const auto& k : expected) {
    if (!groups.count(k)) out.empty_groups.push_back(k.label());
  }

  std::set<std::size_t> sizes;
  for (auto& [key, values] : groups) {
    std::sort(values.begin(), values.end());
    double sum = 0;
    for (double v : values) sum += v;
    const auto n = values.size();
    SystemRating r{key, sum / static_cast<double>(n), n, 0.0};
    if (n > 1) {
      double ss = 0;
      for (double v : values) ss += (v - r.mean) * (v - r.mean);
      r.stddev = std::sqrt(ss / static_cast<double>(n - 1));
    }
    out.ratings.push_back(r);
    sizes.insert(n);
  }
  out.unequal_n = sizes.size() > 1 || !out.empty_groups.empty();
  if (sizes.size() > 1) {
    std::string detail;
    for (const auto& r : out.ratings) {
      detail += (detail.empty() ? "" : ", ") + r.key.label() + "=" + std::to_string(r.n);
    }
    out.warnings.push_back("UnequalN: systems have different dialog counts (" + detail + ")");
  }
  for (const auto& g : out.empty_groups) out.warnings.push_back("EmptyGroup: " + g + " has no scored dialogs");
  return out;
}

std::vector<DialogScore> ground_truth_scores(const Corpus& corpus, const Verbalizer& verbalizer) {
  std::vector<DialogScore> out;
  for (const auto& [id, a] : corpus.annotations) {
    out.push_back(DialogScore{id, a.overall_label, verbalizer(a.overall_label), "", "human"});
  }
  return out;
}

AggregateResult aggregate_ground_truth(const Corpus& corpus, const Verbalizer& verbalizer,
                                       Grouping grouping) {
  auto scores = ground_truth_scores(corpus, verbalizer);
  return aggregate(scores, corpus, grouping);
}

namespace {

// Means that differ only by summation rounding count as tied; real
// differences between group means are many orders of magnitude larger.
bool same_mean(double a, double b) {
  return std::fabs(a - b) <= 1e-9 * std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace

std::vector<RankedSystem> rank(std::span<const SystemRating> ratings) {
  if (ratings.empty()) throw EmptyGroup("no systems to rank");
  std::vector<RankedSystem> out;
  for (const auto& r : ratings) out.push_back({r, 0, false});
  std::sort(out.begin(), out.end(), [](const RankedSystem& a, const RankedSystem& b) {
    if (a.rating.mean != b.rating.mean) return a.rating.mean > b.rating.mean;
    return a.rating.key < b.rating.key;
  });
  // Tie blocks share the rank of their first member and are ordered by key.
  for (std::size_t i = 0; i < out.size();) {
    std::size_t j = i + 1;
    while (j < out.size() && same_mean(out[j - 1].rating.mean, out[j].rating.mean)) ++j;
    std::sort(out.begin() + static_cast<std::ptrdiff_t>(i), out.begin() + static_cast<std::ptrdiff_t>(j),
              [](const RankedSystem& a, const RankedSystem& b) { return a.rating.key < b.rating.key; });
    for (std::size_t k = i; k < j; ++k) {
      out[k].rank = i + 1;
      out[k].tied = j - i > 1;
    }
    i = j;
  }
  return out;
}

std::string ranking_report(std::span<const RankedSystem> ranking, const std::string& title) {
  std::size_t width = 6;
  for (const auto& r : ranking) width = std::max(width, r.rating.key.label().size());
  std::string out;
  if (!title.empty()) out += title + "\n";
  char buf[512];
  std::snprintf(buf, sizeof buf, "%-5s  %-*s  %8s  %5s  %8s\n", "rank", static_cast<int>(width),
                "system", "mean", "n", "stddev");
  out += buf;
  for (const auto& r : ranking) {
    std::string rank = std::to_string(r.rank) + (r.tied ? "=" : "");
    std::snprintf(buf, sizeof buf, "%-5s  %-*s  %8.4f  %5zu  %8.4f\n", rank.c_str(),
                  static_cast<int>(width), r.rating.key.label().c_str(), r.rating.mean, r.rating.n,
                  r.rating.stddev);
    out += buf;
  }
  return out;
}

std::string ranking_records(std::span<const RankedSystem> ranking, const std::string& config_fingerprint) {
  std::string out;
  for (const auto& r : ranking) {
    ojson o;
    o["kind"] = "rating";
    o["config"] = config_fingerprint;
    o["bot_id"] = r.rating.key.bot_id;
    o["polarity"] = to_string(r.rating.key.polarity);
    o["rank"] = r.rank;
    o["tied"] = r.tied;
    o["mean"] = r.rating.mean;
    o["n"] = r.rating.n;
    o["stddev"] = r.rating.stddev;
    out += o.dump() + "\n";
  }
  return out;
}

}  // namespace dialeval
