#include "dialeval/promptkit.hpp"

#include <sstream>

#include <json.hpp>

#include "dialeval/errors.hpp"
#include "dialeval/text.hpp"

namespace dialeval {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

constexpr std::string_view kMaskSentenceHead = "I would rate the Listener in my dialog as";

std::string role_cue(Role r) { return r == Role::Speaker ? "Speaker:" : "Listener:"; }

// Ends the clause with a period unless it already carries terminal punctuation.
std::string close_sentence(std::string s) {
  s = text::normalize(s);
  if (!s.empty() && (s.back() == '.' || s.back() == '!' || s.back() == '?')) return s;
  return s + ".";
}

std::string empathetic_header(const std::string& emotion, const std::string& situation) {
  return "I am a Speaker, feeling " + text::normalize(emotion) + " because " +
         close_sentence(situation) +
         " I shared these emotions with a Listener in a dialog, expecting empathy and "
         "understanding from them. Our dialog went as follows.";
}

constexpr std::string_view kGenericEmpatheticHeader =
    "I am a Speaker. I shared my emotions with a Listener in a dialog, expecting empathy and "
    "understanding from them. Our dialog went as follows.";

constexpr std::string_view kOpenDomainHeader =
    "I talked with a Listener in an open-ended dialog. Our dialog went as follows.";

std::string eval_header(const std::string& emotion, const std::string& situation,
                        Polarity polarity) {
  if (!text::trim(emotion).empty() && !text::trim(situation).empty()) {
    return empathetic_header(emotion, situation);
  }
  if (polarity != Polarity::Unspecified) return std::string(kGenericEmpatheticHeader);
  return std::string(kOpenDomainHeader);
}

std::string transcript(const std::vector<Turn>& turns) {
  std::string out;
  for (const auto& t : turns) {
    out += role_cue(t.role) + " " + t.text + "\n";
  }
  return out;
}

std::string options_clause(const ScoreScale& scale) {
  return "choosing from " + text::join_options(scale.labels()) + " options";
}

enum class Closing { Cloze, Prefix };

std::string render_eval(const Dialog& dialog, const Scenario& scenario, const PromptConfig& config,
                        const Banks& banks, Closing closing) {
  if (config.scale.size() == 0) throw TemplateError("prompt config has no scale");
  if (dialog.turns.empty()) throw TemplateError("dialog '" + dialog.dialog_id + "' has no turns");

  std::string out;
  if (config.use_shots) {
    const auto& bank = banks.demo_bank(config.demo_bank_id);
    for (const auto* d : select_demonstrations(bank, config.scale, scenario.polarity)) {
      out += eval_header(d->emotion_label, d->situation_text, d->polarity) + "\n";
      out += transcript(d->dialog.turns);
      out += std::string(kMaskSentenceHead) + " " + d->label + ", " + options_clause(config.scale) +
             ".\n\n";
    }
  }

  out += eval_header(scenario.emotion_label, scenario.situation_text, scenario.polarity) + "\n";
  out += transcript(dialog.turns);
  if (config.use_instructions) {
    out += banks.instruction_bank(config.instruction_bank_id).lookup(scenario.polarity) + " ";
  }

  if (closing == Closing::Cloze) {
    out += std::string(kMaskSentenceHead) + " " + std::string(kMaskToken) + ", " +
           options_clause(config.scale) + ".";
    if (text::count_occurrences(out, kMaskToken) != 1) {
      throw TemplateError("evaluation prompt for '" + dialog.dialog_id +
                          "' must contain exactly one mask token");
    }
  } else {
    std::string clause = options_clause(config.scale);
    clause[0] = 'C';
    out += clause + ", " + std::string(kMaskSentenceHead);
  }
  return out;
}

Demonstration demo_from_json(const json& j) {
  Demonstration d;
  d.label = j.at("label").get<std::string>();
  d.polarity = parse_polarity(j.value("polarity", std::string("unspecified")));
  d.emotion_label = j.value("emotion", std::string());
  d.situation_text = j.value("situation", std::string());
  d.dialog.dialog_id = j.value("id", std::string());
  d.dialog.source = Source::Human;
  for (const auto& t : j.at("turns")) {
    d.dialog.append(parse_role(t.at("role").get<std::string>()), t.at("text").get<std::string>());
  }
  if (auto vs = validate_dialog(d.dialog); !vs.empty()) {
    throw SchemaError("demonstration '" + d.dialog.dialog_id + "': " + vs.front().message);
  }
  return d;
}

}  // namespace

const std::string& InstructionBank::lookup(Polarity p) const {
  if (auto it = entries.find(p); it != entries.end()) return it->second;
  if (auto it = entries.find(Polarity::Unspecified); it != entries.end()) return it->second;
  throw BankError("instruction bank '" + id + "' has no entry for polarity " +
                  std::string(to_string(p)));
}

const ScoreScale& Banks::scale(const std::string& name) const {
  auto it = scales.find(name);
  if (it == scales.end()) throw BankError("unknown scale '" + name + "'");
  return it->second;
}

const DemoBank& Banks::demo_bank(const std::string& id) const {
  auto it = demo_banks.find(id);
  if (it == demo_banks.end()) throw BankError("unknown demonstration bank '" + id + "'");
  return it->second;
}

const InstructionBank& Banks::instruction_bank(const std::string& id) const {
  auto it = instruction_banks.find(id);
  if (it == instruction_banks.end()) throw BankError("unknown instruction bank '" + id + "'");
  return it->second;
}

std::string PromptConfig::design_name() const {
  return std::string(use_shots ? "fs" : "zs") + (use_instructions ? "+instr" : "");
}

std::string PromptConfig::fingerprint() const {
  std::string values;
  for (double v : scale.values()) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v << ',';
    values += ss.str();
  }
  return design_name() + "|scale=" + scale.name() + "|demos=" + demo_bank_id +
         "|instr=" + instruction_bank_id + "|v=" + text::fnv1a_hex(values).substr(0, 8);
}

PromptConfig make_prompt_config(std::string_view design, const ScoreScale& scale,
                                std::string demo_bank_id, std::string instruction_bank_id) {
  PromptConfig c;
  if (design == "zs") {
  } else if (design == "zs+instr") {
    c.use_instructions = true;
  } else if (design == "fs") {
    c.use_shots = true;
  } else if (design == "fs+instr") {
    c.use_shots = true;
    c.use_instructions = true;
  } else {
    throw ConfigError("unknown prompt design '" + std::string(design) +
                      "' (expected zs, zs+instr, fs or fs+instr)");
  }
  c.scale = scale;
  c.demo_bank_id = std::move(demo_bank_id);
  c.instruction_bank_id = std::move(instruction_bank_id);
  return c;
}

std::vector<std::string> all_designs() { return {"zs", "zs+instr", "fs", "fs+instr"}; }

std::vector<const Demonstration*> select_demonstrations(const DemoBank& bank,
                                                        const ScoreScale& scale,
                                                        Polarity polarity) {
  if (bank.scale_name != scale.name()) {
    throw BankError("demonstration bank '" + bank.id + "' targets scale '" + bank.scale_name +
                    "', not '" + scale.name() + "'");
  }
  auto pick = [&](Polarity p) {
    std::vector<const Demonstration*> out;
    for (const auto& d : bank.demos) {
      if (d.polarity == p) out.push_back(&d);
    }
    return out;
  };
  auto pool = pick(polarity);
  if (pool.empty()) pool = pick(Polarity::Unspecified);
  if (pool.empty()) {
    throw BankError("demonstration bank '" + bank.id + "' has nothing for polarity " +
                    std::string(to_string(polarity)));
  }

  std::vector<const Demonstration*> ordered;
  for (const auto& label : scale.labels()) {
    const Demonstration* found = nullptr;
    for (const auto* d : pool) {
      if (d->label != label) continue;
      if (found) {
        throw BankError("demonstration bank '" + bank.id + "' has two '" + label +
                        "' demonstrations for polarity " + std::string(to_string(polarity)));
      }
      found = d;
    }
    if (!found) {
      throw BankError("demonstration bank '" + bank.id + "' lacks a '" + label +
                      "' demonstration for polarity " + std::string(to_string(polarity)));
    }
    ordered.push_back(found);
  }
  if (ordered.size() != pool.size()) {
    throw BankError("demonstration bank '" + bank.id + "' has labels outside scale '" +
                    scale.name() + "'");
  }
  return ordered;
}

std::string render_play_prompt(const Scenario& scenario, const std::vector<Turn>& history) {
  if (text::trim(scenario.emotion_label).empty()) {
    throw TemplateError("scenario '" + scenario.scenario_id + "' has no emotion label");
  }
  if (text::trim(scenario.situation_text).empty()) {
    throw TemplateError("scenario '" + scenario.scenario_id + "' has no situation text");
  }
  for (std::size_t i = 0; i < history.size(); ++i) {
    Role expected = i % 2 == 0 ? Role::Speaker : Role::Listener;
    if (history[i].role != expected) {
      throw TemplateError("history turn " + std::to_string(i) + " breaks speaker/listener alternation");
    }
    if (history[i].text.empty()) throw TemplateError("history turn " + std::to_string(i) + " is empty");
  }
  if (!history.empty() && history.back().role != Role::Listener) {
    throw TemplateError("play history must end with a Listener turn");
  }

  std::string out = "I am a Speaker, feeling " + text::normalize(scenario.emotion_label) +
                    " because " + close_sentence(scenario.situation_text) +
                    " I am sharing these emotions with a Listener, expecting empathy and "
                    "understanding from them. I respond as a Speaker in a dialog.\n";
  out += transcript(history);
  out += "Speaker:";
  return out;
}

std::string render_eval_prompt(const Dialog& dialog, const Scenario& scenario,
                               const PromptConfig& config, const Banks& banks) {
  return render_eval(dialog, scenario, config, banks, Closing::Cloze);
}

std::string render_eval_completion_prompt(const Dialog& dialog, const Scenario& scenario,
                                          const PromptConfig& config, const Banks& banks) {
  return render_eval(dialog, scenario, config, banks, Closing::Prefix);
}

// ---------------------------------------------------------------------------
// Bank records

Banks parse_banks(std::string_view content) {
  Banks banks;
  std::istringstream in{std::string(content)};
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (text::trim(raw).empty()) continue;
    try {
      json rec = json::parse(raw);
      if (rec.value("kind", std::string()) != "bank") continue;
      const std::string type = rec.at("type").get<std::string>();
      if (type == "scale") {
        ScoreScale s(rec.at("name").get<std::string>(),
                     rec.at("labels").get<std::vector<std::string>>(),
                     rec.at("values").get<std::vector<double>>());
        banks.scales.insert_or_assign(s.name(), s);
      } else if (type == "demonstrations") {
        DemoBank b;
        b.id = rec.at("id").get<std::string>();
        b.scale_name = rec.at("scale").get<std::string>();
        for (const auto& d : rec.at("demos")) b.demos.push_back(demo_from_json(d));
        banks.demo_banks.insert_or_assign(b.id, std::move(b));
      } else if (type == "instructions") {
        InstructionBank b;
        b.id = rec.at("id").get<std::string>();
        for (const auto& [k, v] : rec.at("entries").items()) {
          b.entries[parse_polarity(k)] = text::normalize(v.get<std::string>());
        }
        banks.instruction_banks.insert_or_assign(b.id, std::move(b));
      } else {
        throw SchemaError("unknown bank type '" + type + "'", line);
      }
    } catch (const SchemaError& e) {
      if (e.line()) throw;
      throw SchemaError(e.what(), line);
    } catch (const json::exception& e) {
      throw SchemaError(e.what(), line);
    }
  }
  return banks;
}

Banks load_banks(const std::filesystem::path& path) { return parse_banks(read_file(path)); }

std::string serialize_banks(const Banks& banks) {
  std::string out;
  for (const auto& [name, s] : banks.scales) {
    ojson o;
    o["kind"] = "bank";
    o["type"] = "scale";
    o["name"] = name;
    o["labels"] = s.labels();
    o["values"] = s.values();
    out += o.dump() + "\n";
  }
  for (const auto& [id, b] : banks.demo_banks) {
    ojson o;
    o["kind"] = "bank";
    o["type"] = "demonstrations";
    o["id"] = id;
    o["scale"] = b.scale_name;
    ojson demos = ojson::array();
    for (const auto& d : b.demos) {
      ojson dj;
      dj["id"] = d.dialog.dialog_id;
      dj["label"] = d.label;
      dj["polarity"] = to_string(d.polarity);
      if (!d.emotion_label.empty()) dj["emotion"] = d.emotion_label;
      if (!d.situation_text.empty()) dj["situation"] = d.situation_text;
      ojson turns = ojson::array();
      for (const auto& t : d.dialog.turns) turns.push_back({{"role", to_string(t.role)}, {"text", t.text}});
      dj["turns"] = std::move(turns);
      demos.push_back(std::move(dj));
    }
    o["demos"] = std::move(demos);
    out += o.dump() + "\n";
  }
  for (const auto& [id, b] : banks.instruction_banks) {
    ojson o;
    o["kind"] = "bank";
    o["type"] = "instructions";
    o["id"] = id;
    ojson entries = ojson::object();
    for (const auto& [p, t] : b.entries) entries[std::string(to_string(p))] = t;
    o["entries"] = std::move(entries);
    out += o.dump() + "\n";
  }
  return out;
}

Banks merge_banks(Banks base, const Banks& overlay) {
  for (const auto& [k, v] : overlay.scales) base.scales.insert_or_assign(k, v);
  for (const auto& [k, v] : overlay.demo_banks) base.demo_banks.insert_or_assign(k, v);
  for (const auto& [k, v] : overlay.instruction_banks) base.instruction_banks.insert_or_assign(k, v);
  return base;
}

}  // namespace dialeval
