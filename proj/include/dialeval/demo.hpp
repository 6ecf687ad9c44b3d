#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "dialeval/corpus.hpp"
#include "dialeval/discourse.hpp"
#include "dialeval/ranker.hpp"
#include "dialeval/stats.hpp"

namespace dialeval {

// Eight bundled scenarios: four positive, then four negative.
const std::vector<Scenario>& demo_scenarios();

// Label the scripted judge gives bot `bot_id` on the k-th scenario (0-based)
// of the given polarity. The demo's human annotations use the same table.
const std::string& demo_judge_label(const std::string& bot_id, Polarity polarity, std::size_t k);

struct DemoResult {
  Corpus corpus;
  std::string manifest;
  // Keyed by prompt design name.
  std::map<std::string, AggregateResult> ratings;
  std::map<std::string, CorrelationResult> correlations;
  FlowResult listener_flows;
  FlowResult speaker_flows;
  std::vector<std::filesystem::path> files;
};

// Offline end-to-end run: built-in bots, scripted provider for both the
// speaker and the judge, all four prompt designs. Writes every artifact into
// `out_dir` (created if missing). Output bytes depend only on the code.
DemoResult run_demo(const std::filesystem::path& out_dir);

}  // namespace dialeval
