#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dialeval/corpus.hpp"
#include "dialeval/subprocess.hpp"

namespace dialeval {

struct TurnLabel {
  std::string label;
  double confidence = 1.0;
};

// Labels single turns with emotion/intent tags from a fixed taxonomy.
// Implementations must be safe to call from several threads.
class Annotator {
 public:
  virtual ~Annotator() = default;
  virtual const std::vector<std::string>& taxonomy() const = 0;
  // Throws AnnotatorError when the turn cannot be labelled.
  virtual TurnLabel annotate(const Dialog& dialog, const Turn& turn) = 0;
  virtual std::string fingerprint() const = 0;
};

// Deterministic rules over the case-folded text, first match wins:
// "?" Questioning, "sorry" Sympathizing, "i see" / "i understand" /
// "for sharing" Acknowledging, "thank" Grateful, then emotion words for
// Joyful, Sad, Afraid and Angry, else Neutral.
class KeywordAnnotator : public Annotator {
 public:
  const std::vector<std::string>& taxonomy() const override;
  TurnLabel annotate(const Dialog& dialog, const Turn& turn) override;
  std::string fingerprint() const override { return "keyword-v1"; }
};

// External labeler speaking JSON lines: receives
// {"kind":"annotate_request","dialog_id":..,"turn":..,"role":..,"text":..}
// and answers {"label":..,"confidence":..}. Calls are serialized.
class SubprocessAnnotator : public Annotator {
 public:
  SubprocessAnnotator(std::string command, std::vector<std::string> taxonomy);
  const std::vector<std::string>& taxonomy() const override { return taxonomy_; }
  TurnLabel annotate(const Dialog& dialog, const Turn& turn) override;
  std::string fingerprint() const override { return "subprocess:" + command_; }

 private:
  std::string command_;
  std::vector<std::string> taxonomy_;
  std::mutex mu_;
  std::unique_ptr<LineProcess> process_;
};

struct AnnotationFailure {
  std::string dialog_id;
  std::size_t turn_index = 0;
  std::string message;
};

struct AnnotationRun {
  std::vector<TurnAnnotation> annotations;  // sorted by (dialog, turn)
  std::vector<AnnotationFailure> failures;
};

// One annotation per turn of every dialog. Labels outside the declared
// taxonomy count as failures.
AnnotationRun annotate_corpus(const Corpus& corpus, Annotator& annotator, int concurrency = 1);

struct FlowEdge {
  std::size_t stage = 0;  // position of `from_label` in the role-filtered turn sequence
  std::string from_label;
  std::string to_label;
  std::size_t weight = 0;

  friend bool operator==(const FlowEdge&, const FlowEdge&) = default;
};

struct FlowResult {
  std::vector<FlowEdge> edges;  // sorted by (stage, from, to)
  std::size_t dialogs = 0;
  std::size_t length = 0;       // common sequence length after truncation
  std::vector<std::string> warnings;
};

// Stage-to-stage label transitions over every dialog in the corpus. With a
// role, only that role's turns form the sequence. Ragged dialogs are cut to
// the shortest length with a warning. Throws IncompleteAnnotations when a
// turn in scope has no label, LinkError for annotations of unknown dialogs.
FlowResult compute_flows(std::span<const TurnAnnotation> annotations, const Corpus& corpus,
                         std::optional<Role> role = std::nullopt);

// {"nodes":[{"name":"Label@stage",...}],"links":[{"source":i,"target":j,"value":w}]}
// Nodes are deduplicated and sorted by (stage, label).
std::string sankey_json(std::span<const FlowEdge> edges, std::size_t min_weight = 1);
void export_sankey(std::span<const FlowEdge> edges, const std::filesystem::path& path,
                   std::size_t min_weight = 1);

}  // namespace dialeval
