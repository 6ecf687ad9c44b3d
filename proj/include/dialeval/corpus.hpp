#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dialeval/scale.hpp"

namespace dialeval {

enum class Role { Speaker, Listener };
enum class Source { Human, Synthetic };
enum class Polarity { Positive, Negative, Unspecified };

std::string_view to_string(Role r);
std::string_view to_string(Source s);
std::string_view to_string(Polarity p);
// Accept the lowercase wire spellings; throw SchemaError otherwise.
Role parse_role(std::string_view s);
Source parse_source(std::string_view s);
Polarity parse_polarity(std::string_view s);

struct Turn {
  std::size_t index = 0;
  Role role = Role::Speaker;
  std::string text;

  friend bool operator==(const Turn&, const Turn&) = default;
};

struct Dialog {
  std::string dialog_id;
  std::string scenario_id;
  std::string bot_id;
  std::vector<Turn> turns;
  Source source = Source::Human;

  // Appends a turn with the next index and normalized text.
  void append(Role role, std::string_view text);

  friend bool operator==(const Dialog&, const Dialog&) = default;
};

struct Scenario {
  std::string scenario_id;
  std::string emotion_label;
  Polarity polarity = Polarity::Unspecified;
  std::string situation_text;
  std::string opener_text;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct GroundTruthAnnotation {
  std::string dialog_id;
  std::string overall_label;
  std::map<std::string, double> fine_grained;

  friend bool operator==(const GroundTruthAnnotation&, const GroundTruthAnnotation&) = default;
};

// One machine score; the `score` record kind.
struct DialogScore {
  std::string dialog_id;
  std::string label;
  double value = 0;
  std::string raw_completion;
  std::string config_fingerprint;

  friend bool operator==(const DialogScore&, const DialogScore&) = default;
};

// One turn-level emotion/intent label; the `turn_annotation` record kind.
struct TurnAnnotation {
  std::string dialog_id;
  std::size_t turn_index = 0;
  std::string label;
  double confidence = 1.0;

  friend bool operator==(const TurnAnnotation&, const TurnAnnotation&) = default;
};

struct Corpus {
  std::optional<ScoreScale> scale;
  std::map<std::string, Scenario> scenarios;
  std::map<std::string, Dialog> dialogs;
  std::map<std::string, GroundTruthAnnotation> annotations;
  // Sorted by (config_fingerprint, dialog_id) on save.
  std::vector<DialogScore> scores;
  // Sorted by (dialog_id, turn_index, label) on save.
  std::vector<TurnAnnotation> turn_annotations;

  const Scenario& scenario_of(const Dialog& d) const;

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

enum class ViolationRule {
  IndexMismatch,
  AlternationViolation,
  EmptyText,
  UnnormalizedText,
  TooFewTurns,
  OddSyntheticLength,
};

std::string_view to_string(ViolationRule r);

struct Violation {
  ViolationRule rule;
  // Offending turn index, or nullopt for dialog-level rules.
  std::optional<std::size_t> turn_index;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

std::vector<Violation> validate_dialog(const Dialog& dialog);

// Checks every invariant of a linked corpus: dialog rules, scenario links,
// annotation links and labels, score links. Throws SchemaError or LinkError.
void validate_corpus(const Corpus& corpus);

// Canonical line-delimited store. Records of kind "bank", "rating",
// "correlation" and "manifest" are owned by other readers and skipped.
Corpus load_corpus(const std::filesystem::path& path);
Corpus parse_corpus(std::string_view content);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);
std::string serialize_corpus(const Corpus& corpus);

// Single-record serializers used by incremental writers (play engine, scorer).
std::string dialog_record(const Dialog& d);
std::string scenario_record(const Scenario& s);
std::string score_record(const DialogScore& s);
std::string turn_annotation_record(const TurnAnnotation& a);
std::string header_record();
std::string scale_record(const ScoreScale& s);

// Appends newline-terminated records to `path`, writing a header first when
// the file is new or empty.
void append_records(const std::filesystem::path& path, const std::vector<std::string>& records);

struct IngestResult {
  Corpus corpus;
  std::vector<std::string> warnings;
};

// iEval-style export: a JSON array (or JSON-lines) of conversation objects.
// See docs/corpus-format.md for the accepted native field names.
IngestResult ingest_ieval(const std::filesystem::path& path);
IngestResult ingest_ieval_text(std::string_view content);

// FED-style export: a JSON array of {"context": "User: ...\nSystem: ...",
// "system": ..., "annotations": {"Overall": [...], ...}} entries. Turn-level
// entries (those carrying a "response") are skipped.
IngestResult ingest_fed(const std::filesystem::path& path);
IngestResult ingest_fed_text(std::string_view content);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace dialeval
