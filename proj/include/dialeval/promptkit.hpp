#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dialeval/corpus.hpp"
#include "dialeval/scale.hpp"

namespace dialeval {

// The cloze placeholder; every evaluation prompt carries exactly one.
inline constexpr std::string_view kMaskToken = "___";

struct Demonstration {
  Dialog dialog;
  std::string label;
  Polarity polarity = Polarity::Unspecified;
  // Optional scenario context; demonstrations without it get a generic header.
  std::string emotion_label;
  std::string situation_text;

  friend bool operator==(const Demonstration&, const Demonstration&) = default;
};

struct DemoBank {
  std::string id;
  std::string scale_name;
  std::vector<Demonstration> demos;

  friend bool operator==(const DemoBank&, const DemoBank&) = default;
};

struct InstructionBank {
  std::string id;
  std::map<Polarity, std::string> entries;

  // Exact polarity first, then the Unspecified entry; BankError otherwise.
  const std::string& lookup(Polarity p) const;

  friend bool operator==(const InstructionBank&, const InstructionBank&) = default;
};

struct Banks {
  std::map<std::string, ScoreScale> scales;
  std::map<std::string, DemoBank> demo_banks;
  std::map<std::string, InstructionBank> instruction_banks;

  const ScoreScale& scale(const std::string& name) const;
  const DemoBank& demo_bank(const std::string& id) const;
  const InstructionBank& instruction_bank(const std::string& id) const;

  friend bool operator==(const Banks&, const Banks&) = default;
};

// The 2x2 prompt design: zero/few-shot crossed with/without instructions.
struct PromptConfig {
  bool use_shots = false;
  bool use_instructions = false;
  ScoreScale scale;
  std::string demo_bank_id;
  std::string instruction_bank_id;

  // "zs", "zs+instr", "fs" or "fs+instr".
  std::string design_name() const;
  // Stable identifier of the design, scale and banks; keys score records.
  std::string fingerprint() const;
};

// Parses "zs" | "zs+instr" | "fs" | "fs+instr" into a config using the named
// scale and banks. Throws ConfigError on unknown names.
PromptConfig make_prompt_config(std::string_view design, const ScoreScale& scale,
                                std::string demo_bank_id, std::string instruction_bank_id);

// All four designs: zs, zs+instr, fs, fs+instr.
std::vector<std::string> all_designs();

// Built-in scales ("ieval-3", "fed-5"), demonstration banks and instruction
// banks ("ieval", "fed").
const Banks& builtin_banks();

// Bank records ("kind":"bank") in the canonical line format.
Banks parse_banks(std::string_view content);
Banks load_banks(const std::filesystem::path& path);
std::string serialize_banks(const Banks& banks);
// Later banks override earlier ones by id.
Banks merge_banks(Banks base, const Banks& overlay);

// Header, transcript and a trailing "Speaker:" cue. `history` must alternate,
// start with the Speaker, and be empty or end with a Listener turn.
std::string render_play_prompt(const Scenario& scenario, const std::vector<Turn>& history);

// Cloze-form evaluation prompt with exactly one mask token.
std::string render_eval_prompt(const Dialog& dialog, const Scenario& scenario,
                               const PromptConfig& config, const Banks& banks);

// Prefix form sent to a completion API: identical to the cloze prompt except
// that the closing sentence lists the options first and stops right where
// the mask was, e.g. "Choosing from Bad, Okay, and Good options, I would
// rate the Listener in my dialog as".
std::string render_eval_completion_prompt(const Dialog& dialog, const Scenario& scenario,
                                          const PromptConfig& config, const Banks& banks);

// Demonstrations selected for a target polarity, ordered worst to best.
std::vector<const Demonstration*> select_demonstrations(const DemoBank& bank,
                                                        const ScoreScale& scale,
                                                        Polarity polarity);

}  // namespace dialeval
