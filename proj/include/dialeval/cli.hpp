#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dialeval/botbridge.hpp"
#include "dialeval/corpus.hpp"
#include "dialeval/playengine.hpp"
#include "dialeval/providers.hpp"
#include "dialeval/ranker.hpp"
#include "dialeval/stats.hpp"

namespace dialeval::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFatal = 1;
inline constexpr int kExitWarnings = 2;

struct ProviderSpec {
  std::string kind;  // "http" | "scripted"
  ProviderConfig http;
  // Scripted: JSON file, either an array of replies or
  // {"responses":[...], "matchers":[...]}.
  std::filesystem::path script;
};

struct RunConfig {
  std::optional<ProviderSpec> provider;
  SessionConfig session;
  std::string run_id = "run";

  std::vector<std::string> designs;  // empty: command default
  std::string scale = "ieval-3";
  std::string demo_bank = "ieval";
  std::string instruction_bank = "ieval";
  std::optional<std::filesystem::path> banks;

  std::vector<BotDescriptor> bots;  // empty: the built-in bots

  Grouping grouping = Grouping::BotPolarity;
  CorrelationLevel level = CorrelationLevel::System;
  std::optional<CorrelationMethod> method;
  std::optional<Role> role = Role::Listener;
  std::size_t min_weight = 1;
  std::string annotator = "keyword";  // or a shell command
  std::vector<std::string> taxonomy;  // required for a command annotator

  std::filesystem::path corpus;
  std::filesystem::path out;
  std::optional<std::filesystem::path> manifest;
  std::optional<std::filesystem::path> scatter;
  std::optional<std::filesystem::path> records;

  int concurrency = 1;
  bool strict = true;
  bool retry_once = false;
  bool allow_unbalanced = false;
  bool human = false;  // rank: use ground-truth annotations
};

// JSON config document; unknown keys raise ConfigError. The credential is
// never stored in the file, only the name of the variable holding it.
RunConfig parse_run_config(const std::string& content);
RunConfig load_run_config(const std::filesystem::path& path);

ProviderPtr make_provider(const ProviderSpec& spec);

// Every command returns an exit code and reports on `out` / `err`.
// Library errors escape; run_guarded turns them into exit code 1.
int cmd_play(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_score(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_rank(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_correlate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_annotate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_flows(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_validate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_demo(const RunConfig& config, std::ostream& out, std::ostream& err);
// format: "ieval" | "fed"; reads config.corpus, writes config.out.
int cmd_ingest(const std::string& format, const RunConfig& config, std::ostream& out, std::ostream& err);

int run_guarded(const std::function<int()>& command, std::ostream& err);

}  // namespace dialeval::cli
