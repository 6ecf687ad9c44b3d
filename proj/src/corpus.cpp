#include "dialeval/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dialeval/errors.hpp"
#include "dialeval/text.hpp"

namespace dialeval {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

constexpr std::string_view kFormat = "dialeval-corpus";
constexpr int kVersion = 1;

const std::set<std::string, std::less<>> kForeignKinds = {"bank", "rating", "correlation",
                                                          "manifest"};

std::string get_string(const json& rec, const char* field, std::size_t line,
                       bool required = true) {
  auto it = rec.find(field);
  if (it == rec.end() || it->is_null()) {
    if (required) throw SchemaError(std::string("missing field \"") + field + "\"", line);
    return {};
  }
  if (!it->is_string()) throw SchemaError(std::string("field \"") + field + "\" must be a string", line);
  return it->get<std::string>();
}

double get_number(const json& rec, const char* field, std::size_t line) {
  auto it = rec.find(field);
  if (it == rec.end() || !it->is_number()) {
    throw SchemaError(std::string("field \"") + field + "\" must be a number", line);
  }
  return it->get<double>();
}

ojson turns_to_json(const std::vector<Turn>& turns) {
  ojson arr = ojson::array();
  for (const auto& t : turns) {
    ojson o;
    o["role"] = to_string(t.role);
    o["text"] = t.text;
    arr.push_back(std::move(o));
  }
  return arr;
}

std::string violations_summary(const std::vector<Violation>& vs) {
  std::string out;
  for (const auto& v : vs) {
    if (!out.empty()) out += "; ";
    out += v.message;
  }
  return out;
}

}  // namespace

std::string_view to_string(Role r) { return r == Role::Speaker ? "speaker" : "listener"; }
std::string_view to_string(Source s) { return s == Source::Human ? "human" : "synthetic"; }
std::string_view to_string(Polarity p) {
  switch (p) {
    case Polarity::Positive: return "positive";
    case Polarity::Negative: return "negative";
    case Polarity::Unspecified: break;
  }
  return "unspecified";
}

Role parse_role(std::string_view s) {
  if (s == "speaker") return Role::Speaker;
  if (s == "listener") return Role::Listener;
  throw SchemaError("unknown role \"" + std::string(s) + "\"");
}

Source parse_source(std::string_view s) {
  if (s == "human") return Source::Human;
  if (s == "synthetic") return Source::Synthetic;
  throw SchemaError("unknown source \"" + std::string(s) + "\"");
}

Polarity parse_polarity(std::string_view s) {
  if (s == "positive") return Polarity::Positive;
  if (s == "negative") return Polarity::Negative;
  if (s == "unspecified" || s.empty()) return Polarity::Unspecified;
  throw SchemaError("unknown polarity \"" + std::string(s) + "\"");
}

std::string_view to_string(ViolationRule r) {
  switch (r) {
    case ViolationRule::IndexMismatch: return "IndexMismatch";
    case ViolationRule::AlternationViolation: return "AlternationViolation";
    case ViolationRule::EmptyText: return "EmptyText";
    case ViolationRule::UnnormalizedText: return "UnnormalizedText";
    case ViolationRule::TooFewTurns: return "TooFewTurns";
    case ViolationRule::OddSyntheticLength: return "OddSyntheticLength";
  }
  return "Unknown";
}

void Dialog::append(Role role, std::string_view t) {
  turns.push_back(Turn{turns.size(), role, text::normalize(t)});
}

const Scenario& Corpus::scenario_of(const Dialog& d) const {
  auto it = scenarios.find(d.scenario_id);
  if (it == scenarios.end()) {
    throw LinkError("dialog '" + d.dialog_id + "' references unknown scenario '" +
                    d.scenario_id + "'");
  }
  return it->second;
}

std::vector<Violation> validate_dialog(const Dialog& dialog) {
  std::vector<Violation> out;
  auto at = [&](ViolationRule rule, std::size_t i, const std::string& what) {
    out.push_back({rule, i,
                   std::string(to_string(rule)) + " at turn " + std::to_string(i) + " of dialog '" +
                       dialog.dialog_id + "': " + what});
  };
  for (std::size_t i = 0; i < dialog.turns.size(); ++i) {
    const auto& t = dialog.turns[i];
    if (t.index != i) at(ViolationRule::IndexMismatch, i, "index field is " + std::to_string(t.index));
    Role expected = i % 2 == 0 ? Role::Speaker : Role::Listener;
    if (t.role != expected) {
      at(ViolationRule::AlternationViolation, i,
         "expected " + std::string(to_string(expected)) + ", got " + std::string(to_string(t.role)));
    }
    if (t.text.empty()) {
      at(ViolationRule::EmptyText, i, "empty text");
    } else if (text::normalize(t.text) != t.text) {
      at(ViolationRule::UnnormalizedText, i, "text has stray whitespace");
    }
  }
  if (dialog.turns.size() < 2) {
    out.push_back({ViolationRule::TooFewTurns, std::nullopt,
                   "TooFewTurns in dialog '" + dialog.dialog_id + "': " +
                       std::to_string(dialog.turns.size()) + " turn(s), need at least 2"});
  }
  if (dialog.source == Source::Synthetic && dialog.turns.size() % 2 != 0) {
    out.push_back({ViolationRule::OddSyntheticLength, std::nullopt,
                   "OddSyntheticLength in dialog '" + dialog.dialog_id + "': synthetic session has " +
                       std::to_string(dialog.turns.size()) + " turns"});
  }
  return out;
}

void validate_corpus(const Corpus& corpus) {
  for (const auto& [id, s] : corpus.scenarios) {
    if (id != s.scenario_id) throw SchemaError("scenario key '" + id + "' != id '" + s.scenario_id + "'");
    if (s.opener_text.empty()) throw SchemaError("scenario '" + id + "' has an empty opener");
  }
  for (const auto& [id, d] : corpus.dialogs) {
    if (id != d.dialog_id) throw SchemaError("dialog key '" + id + "' != id '" + d.dialog_id + "'");
    if (auto vs = validate_dialog(d); !vs.empty()) throw SchemaError(violations_summary(vs));
    if (!corpus.scenarios.count(d.scenario_id)) {
      throw LinkError("dialog '" + id + "' references unknown scenario '" + d.scenario_id + "'");
    }
  }
  for (const auto& [id, a] : corpus.annotations) {
    if (!corpus.dialogs.count(id)) throw LinkError("annotation for unknown dialog '" + id + "'");
    if (!corpus.scale) throw SchemaError("annotation for '" + id + "' but the corpus has no scale");
    if (!corpus.scale->contains(a.overall_label)) {
      throw SchemaError("annotation for '" + id + "' uses label '" + a.overall_label +
                        "' outside scale '" + corpus.scale->name() + "'");
    }
  }
  for (const auto& s : corpus.scores) {
    if (!corpus.dialogs.count(s.dialog_id)) throw LinkError("score for unknown dialog '" + s.dialog_id + "'");
  }
  for (const auto& a : corpus.turn_annotations) {
    auto it = corpus.dialogs.find(a.dialog_id);
    if (it == corpus.dialogs.end()) {
      throw LinkError("turn annotation for unknown dialog '" + a.dialog_id + "'");
    }
    if (a.turn_index >= it->second.turns.size()) {
      throw LinkError("turn annotation for '" + a.dialog_id + "' turn " +
                      std::to_string(a.turn_index) + " beyond dialog length");
    }
  }
}

std::string header_record() {
  ojson o;
  o["kind"] = "header";
  o["format"] = kFormat;
  o["version"] = kVersion;
  return o.dump();
}

std::string scale_record(const ScoreScale& s) {
  ojson o;
  o["kind"] = "scale";
  o["name"] = s.name();
  o["labels"] = s.labels();
  o["values"] = s.values();
  return o.dump();
}

std::string scenario_record(const Scenario& s) {
  ojson o;
  o["kind"] = "scenario";
  o["id"] = s.scenario_id;
  o["emotion"] = s.emotion_label;
  o["polarity"] = to_string(s.polarity);
  o["situation"] = s.situation_text;
  o["opener"] = s.opener_text;
  return o.dump();
}

std::string dialog_record(const Dialog& d) {
  ojson o;
  o["kind"] = "dialog";
  o["id"] = d.dialog_id;
  o["scenario_id"] = d.scenario_id;
  o["bot_id"] = d.bot_id;
  o["source"] = to_string(d.source);
  o["turns"] = turns_to_json(d.turns);
  return o.dump();
}

namespace {
std::string annotation_record(const GroundTruthAnnotation& a) {
  ojson o;
  o["kind"] = "annotation";
  o["dialog_id"] = a.dialog_id;
  o["overall"] = a.overall_label;
  ojson fg = ojson::object();
  for (const auto& [k, v] : a.fine_grained) fg[k] = v;
  o["fine_grained"] = std::move(fg);
  return o.dump();
}
}  // namespace

std::string score_record(const DialogScore& s) {
  ojson o;
  o["kind"] = "score";
  o["dialog_id"] = s.dialog_id;
  o["config"] = s.config_fingerprint;
  o["label"] = s.label;
  o["value"] = s.value;
  o["raw"] = s.raw_completion;
  return o.dump();
}

std::string turn_annotation_record(const TurnAnnotation& a) {
  ojson o;
  o["kind"] = "turn_annotation";
  o["dialog_id"] = a.dialog_id;
  o["turn"] = a.turn_index;
  o["label"] = a.label;
  o["confidence"] = a.confidence;
  return o.dump();
}

std::string serialize_corpus(const Corpus& corpus) {
  std::string out = header_record() + "\n";
  if (corpus.scale) out += scale_record(*corpus.scale) + "\n";
  for (const auto& [_, s] : corpus.scenarios) out += scenario_record(s) + "\n";
  for (const auto& [_, d] : corpus.dialogs) out += dialog_record(d) + "\n";
  for (const auto& [_, a] : corpus.annotations) out += annotation_record(a) + "\n";

  auto scores = corpus.scores;
  std::stable_sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) {
    return std::tie(a.config_fingerprint, a.dialog_id) < std::tie(b.config_fingerprint, b.dialog_id);
  });
  for (const auto& s : scores) out += score_record(s) + "\n";

  auto tas = corpus.turn_annotations;
  std::stable_sort(tas.begin(), tas.end(), [](const auto& a, const auto& b) {
    return std::tie(a.dialog_id, a.turn_index, a.label) < std::tie(b.dialog_id, b.turn_index, b.label);
  });
  for (const auto& a : tas) out += turn_annotation_record(a) + "\n";
  return out;
}

Corpus parse_corpus(std::string_view content) {
  Corpus corpus;
  std::istringstream in{std::string(content)};
  std::string raw;
  std::size_t line = 0;
  std::size_t records = 0;
  std::set<std::pair<std::string, std::string>> seen_scores;

  while (std::getline(in, raw)) {
    ++line;
    if (text::trim(raw).empty()) continue;
    json rec;
    try {
      rec = json::parse(raw);
    } catch (const json::parse_error& e) {
      throw SchemaError(std::string("malformed JSON: ") + e.what(), line);
    }
    if (!rec.is_object()) throw SchemaError("record is not an object", line);
    const std::string kind = get_string(rec, "kind", line);
    ++records;

    try {
      if (kind == "header") {
        if (records != 1) throw SchemaError("header must be the first record", line);
        if (get_string(rec, "format", line) != kFormat) throw SchemaError("unknown format", line);
        if (!rec.contains("version") || rec["version"] != kVersion) {
          throw SchemaError("unsupported version", line);
        }
      } else if (kind == "scale") {
        if (corpus.scale) throw SchemaError("more than one scale record", line);
        auto labels = rec.at("labels").get<std::vector<std::string>>();
        auto values = rec.at("values").get<std::vector<double>>();
        corpus.scale = ScoreScale(get_string(rec, "name", line), std::move(labels), std::move(values));
      } else if (kind == "scenario") {
        Scenario s;
        s.scenario_id = get_string(rec, "id", line);
        s.emotion_label = text::normalize(get_string(rec, "emotion", line, false));
        s.polarity = parse_polarity(get_string(rec, "polarity", line, false));
        s.situation_text = text::normalize(get_string(rec, "situation", line, false));
        s.opener_text = text::normalize(get_string(rec, "opener", line));
        if (s.opener_text.empty()) throw SchemaError("scenario '" + s.scenario_id + "' has an empty opener", line);
        if (!corpus.scenarios.emplace(s.scenario_id, s).second) {
          throw SchemaError("duplicate scenario id '" + s.scenario_id + "'", line);
        }
      } else if (kind == "dialog") {
        Dialog d;
        d.dialog_id = get_string(rec, "id", line);
        d.scenario_id = get_string(rec, "scenario_id", line);
        d.bot_id = get_string(rec, "bot_id", line);
        d.source = parse_source(get_string(rec, "source", line, false).empty()
                                    ? "human"
                                    : get_string(rec, "source", line));
        auto it = rec.find("turns");
        if (it == rec.end() || !it->is_array()) throw SchemaError("dialog without a turns array", line);
        for (const auto& t : *it) {
          if (!t.is_object()) throw SchemaError("turn is not an object", line);
          d.append(parse_role(get_string(t, "role", line)), get_string(t, "text", line));
        }
        if (auto vs = validate_dialog(d); !vs.empty()) {
          throw SchemaError("dialog '" + d.dialog_id + "' is invalid: " + violations_summary(vs), line);
        }
        if (!corpus.dialogs.emplace(d.dialog_id, d).second) {
          throw SchemaError("duplicate dialog id '" + d.dialog_id + "'", line);
        }
      } else if (kind == "annotation") {
        GroundTruthAnnotation a;
        a.dialog_id = get_string(rec, "dialog_id", line);
        a.overall_label = get_string(rec, "overall", line);
        if (auto it = rec.find("fine_grained"); it != rec.end() && !it->is_null()) {
          if (!it->is_object()) throw SchemaError("fine_grained must be an object", line);
          for (const auto& [k, v] : it->items()) {
            if (!v.is_number()) throw SchemaError("fine_grained '" + k + "' is not a number", line);
            a.fine_grained[k] = v.get<double>();
          }
        }
        if (!corpus.annotations.emplace(a.dialog_id, a).second) {
          throw SchemaError("duplicate annotation for '" + a.dialog_id + "'", line);
        }
      } else if (kind == "score") {
        DialogScore s;
        s.dialog_id = get_string(rec, "dialog_id", line);
        s.config_fingerprint = get_string(rec, "config", line);
        s.label = get_string(rec, "label", line);
        s.value = get_number(rec, "value", line);
        s.raw_completion = get_string(rec, "raw", line, false);
        if (!seen_scores.emplace(s.config_fingerprint, s.dialog_id).second) {
          throw SchemaError("duplicate score for '" + s.dialog_id + "' under '" +
                                s.config_fingerprint + "'",
                            line);
        }
        corpus.scores.push_back(std::move(s));
      } else if (kind == "turn_annotation") {
        TurnAnnotation a;
        a.dialog_id = get_string(rec, "dialog_id", line);
        auto it = rec.find("turn");
        if (it == rec.end() || !it->is_number_unsigned()) {
          throw SchemaError("turn_annotation needs a non-negative integer \"turn\"", line);
        }
        a.turn_index = it->get<std::size_t>();
        a.label = get_string(rec, "label", line);
        a.confidence = get_number(rec, "confidence", line);
        corpus.turn_annotations.push_back(std::move(a));
      } else if (!kForeignKinds.count(kind)) {
        throw SchemaError("unknown record kind \"" + kind + "\"", line);
      }
    } catch (const SchemaError& e) {
      if (e.line() != 0) throw;
      throw SchemaError(e.what(), line);
    } catch (const json::exception& e) {
      throw SchemaError(e.what(), line);
    }
  }

  validate_corpus(corpus);
  return corpus;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

Corpus load_corpus(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("'" + path.string() + "' does not exist");
  return parse_corpus(read_file(path));
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  validate_corpus(corpus);
  write_file(path, serialize_corpus(corpus));
}

void append_records(const std::filesystem::path& path, const std::vector<std::string>& records) {
  std::error_code ec;
  bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw IoError("cannot open '" + path.string() + "' for appending");
  if (fresh) out << header_record() << '\n';
  for (const auto& r : records) out << r << '\n';
  out.flush();
  if (!out) throw IoError("append to '" + path.string() + "' failed");
}

// ---------------------------------------------------------------------------
// Adapters

namespace {

std::vector<json> parse_documents(std::string_view content) {
  auto first = content.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  std::vector<json> docs;
  if (content[first] == '[') {
    json arr;
    try {
      arr = json::parse(content);
    } catch (const json::parse_error& e) {
      throw SchemaError(std::string("malformed JSON: ") + e.what());
    }
    for (auto& d : arr) docs.push_back(std::move(d));
    return docs;
  }
  std::istringstream in{std::string(content)};
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (text::trim(raw).empty()) continue;
    try {
      docs.push_back(json::parse(raw));
    } catch (const json::parse_error& e) {
      throw SchemaError(std::string("malformed JSON: ") + e.what(), line);
    }
  }
  return docs;
}

const json* first_field(const json& obj, std::initializer_list<const char*> names) {
  for (const char* n : names) {
    auto it = obj.find(n);
    if (it != obj.end() && !it->is_null()) return &*it;
  }
  return nullptr;
}

std::string string_field(const json& obj, std::initializer_list<const char*> names,
                         const std::string& fallback = {}) {
  const json* v = first_field(obj, names);
  if (!v) return fallback;
  if (v->is_string()) return v->get<std::string>();
  if (v->is_number_integer()) return std::to_string(v->get<long long>());
  throw SchemaError(std::string("field \"") + *names.begin() + "\" must be a string");
}

std::optional<Role> role_from_native(std::string who) {
  who = text::casefold(text::trim(who));
  if (who == "speaker" || who == "human" || who == "user") return Role::Speaker;
  if (who == "listener" || who == "bot" || who == "system" || who == "chatbot" || who == "model") {
    return Role::Listener;
  }
  return std::nullopt;
}

// Merges consecutive same-role turns and drops leading listener turns,
// reporting each repair as a warning.
void append_repaired(Dialog& d, Role role, const std::string& utterance,
                     std::vector<std::string>& warnings) {
  std::string t = text::normalize(utterance);
  if (t.empty()) {
    warnings.push_back(d.dialog_id + ": dropped an empty turn");
    return;
  }
  if (d.turns.empty() && role == Role::Listener) {
    warnings.push_back(d.dialog_id + ": dropped a leading listener turn");
    return;
  }
  if (!d.turns.empty() && d.turns.back().role == role) {
    warnings.push_back(d.dialog_id + ": merged consecutive " + std::string(to_string(role)) +
                       " turns at index " + std::to_string(d.turns.size() - 1));
    d.turns.back().text = text::normalize(d.turns.back().text + " " + t);
    return;
  }
  d.append(role, t);
}

constexpr const char* kIevalQualities[] = {"politeness", "empathy", "likability", "repetitiveness",
                                           "making_sense"};

}  // namespace

IngestResult ingest_ieval_text(std::string_view content) {
  IngestResult result;
  Corpus& c = result.corpus;
  c.scale = ieval_scale();
  std::size_t n = 0;
  for (const auto& doc : parse_documents(content)) {
    ++n;
    const std::string where = "conversation #" + std::to_string(n);
    if (!doc.is_object()) throw SchemaError(where + " is not an object");

    Scenario sc;
    sc.emotion_label = text::normalize(string_field(doc, {"emotion", "emotion_label"}));
    sc.situation_text = text::normalize(string_field(doc, {"situation", "prompt", "situation_text"}));
    sc.polarity = parse_polarity(text::casefold(string_field(doc, {"polarity", "emotion_polarity"})));
    if (sc.polarity == Polarity::Unspecified) {
      throw SchemaError(where + ": iEval conversations need a positive or negative polarity");
    }
    sc.scenario_id = string_field(doc, {"scenario_id"});
    if (sc.scenario_id.empty()) {
      sc.scenario_id = "sc-" + text::fnv1a_hex(sc.emotion_label + "\n" + sc.situation_text).substr(0, 12);
    }

    Dialog d;
    d.dialog_id = string_field(doc, {"conversation_id", "dialog_id", "id"});
    if (d.dialog_id.empty()) d.dialog_id = "ieval-" + std::to_string(n);
    d.bot_id = string_field(doc, {"bot", "model", "chatbot", "bot_id"});
    if (d.bot_id.empty()) throw SchemaError(where + ": missing bot name");
    d.scenario_id = sc.scenario_id;
    d.source = Source::Human;

    const json* turns = first_field(doc, {"turns", "dialog", "conversation"});
    if (!turns || !turns->is_array()) throw SchemaError(where + ": missing turns array");
    std::size_t pos = 0;
    for (const auto& t : *turns) {
      if (t.is_string()) {
        append_repaired(d, pos % 2 == 0 ? Role::Speaker : Role::Listener, t.get<std::string>(),
                        result.warnings);
      } else if (t.is_object()) {
        auto role = role_from_native(string_field(t, {"role", "speaker", "author"}));
        if (!role) throw SchemaError(where + ": turn " + std::to_string(pos) + " has an unknown role");
        append_repaired(d, *role, string_field(t, {"text", "utterance"}), result.warnings);
      } else {
        throw SchemaError(where + ": turn " + std::to_string(pos) + " is neither string nor object");
      }
      ++pos;
    }
    if (d.turns.size() != 6) {
      result.warnings.push_back(d.dialog_id + ": expected 6 turns, found " +
                                std::to_string(d.turns.size()));
    }
    if (d.turns.empty()) throw SchemaError(where + ": no usable turns");
    sc.opener_text = d.turns.front().text;

    if (const json* overall = first_field(doc, {"overall", "overall_rating", "rating"})) {
      GroundTruthAnnotation a;
      a.dialog_id = d.dialog_id;
      if (overall->is_number()) {
        auto label = c.scale->label_for(overall->get<double>());
        if (!label) throw SchemaError(where + ": overall rating out of range");
        a.overall_label = *label;
      } else {
        a.overall_label = text::normalize(overall->get<std::string>());
        for (const auto& l : c.scale->labels()) {
          if (text::casefold(l) == text::casefold(a.overall_label)) a.overall_label = l;
        }
      }
      const json* fg = first_field(doc, {"fine_grained", "qualities"});
      const json& src = fg ? *fg : doc;
      for (const char* q : kIevalQualities) {
        auto it = src.find(q);
        if (it == src.end() || !it->is_number()) continue;
        double v = it->get<double>();
        if (v < 1 || v > 5) {
          throw SchemaError(where + ": " + q + " rating " + std::to_string(v) + " outside 1-5");
        }
        a.fine_grained[q] = v;
      }
      if (!c.annotations.emplace(a.dialog_id, a).second) {
        throw SchemaError(where + ": duplicate dialog id '" + d.dialog_id + "'");
      }
    }

    c.scenarios.emplace(sc.scenario_id, sc);  // first occurrence supplies the opener
    if (!c.dialogs.emplace(d.dialog_id, d).second) {
      throw SchemaError(where + ": duplicate dialog id '" + d.dialog_id + "'");
    }
  }
  validate_corpus(c);
  return result;
}

IngestResult ingest_ieval(const std::filesystem::path& path) {
  return ingest_ieval_text(read_file(path));
}

IngestResult ingest_fed_text(std::string_view content) {
  IngestResult result;
  Corpus& c = result.corpus;
  c.scale = fed_scale();
  std::size_t n = 0;
  for (const auto& doc : parse_documents(content)) {
    if (!doc.is_object()) throw SchemaError("FED entry is not an object");
    if (doc.contains("response")) continue;  // turn-level entry
    ++n;
    char idbuf[32];
    std::snprintf(idbuf, sizeof idbuf, "fed-%03zu", n);
    Dialog d;
    d.dialog_id = string_field(doc, {"dialog_id", "id"}, idbuf);
    d.bot_id = string_field(doc, {"system", "bot"}, "unknown");
    d.scenario_id = d.dialog_id;
    d.source = Source::Human;

    std::istringstream ctx(string_field(doc, {"context"}));
    std::string raw;
    std::optional<Role> current;
    std::string buffer;
    auto flush = [&] {
      if (current) append_repaired(d, *current, buffer, result.warnings);
      buffer.clear();
    };
    while (std::getline(ctx, raw)) {
      auto colon = raw.find(':');
      std::optional<Role> role;
      if (colon != std::string::npos && colon < 16) role = role_from_native(raw.substr(0, colon));
      if (role) {
        flush();
        current = role;
        buffer = raw.substr(colon + 1);
      } else {
        buffer += " " + raw;
      }
    }
    flush();
    if (d.turns.empty()) throw SchemaError(d.dialog_id + ": empty context");

    Scenario sc;
    sc.scenario_id = d.dialog_id;
    sc.polarity = Polarity::Unspecified;
    sc.opener_text = d.turns.front().text;

    if (const json* ann = first_field(doc, {"annotations"}); ann && ann->is_object()) {
      GroundTruthAnnotation a;
      a.dialog_id = d.dialog_id;
      for (const auto& [quality, ratings] : ann->items()) {
        if (!ratings.is_array() || ratings.empty()) continue;
        double sum = 0;
        std::size_t count = 0;
        for (const auto& r : ratings) {
          if (r.is_number()) {
            sum += r.get<double>();
            ++count;
          }
        }
        if (count == 0) continue;
        a.fine_grained[quality] = sum / static_cast<double>(count);
      }
      if (auto it = a.fine_grained.find("Overall"); it != a.fine_grained.end()) {
        double v = std::clamp(std::round(it->second), c.scale->min_value(), c.scale->max_value());
        a.overall_label = *c.scale->label_for(v);
        c.annotations.emplace(a.dialog_id, std::move(a));
      } else {
        result.warnings.push_back(d.dialog_id + ": no Overall rating; annotation skipped");
      }
    }
    c.scenarios.emplace(sc.scenario_id, sc);
    if (!c.dialogs.emplace(d.dialog_id, d).second) {
      throw SchemaError("duplicate dialog id '" + d.dialog_id + "'");
    }
  }
  for (const auto& [id, d] : c.dialogs) {
    if (d.turns.size() < 2) throw SchemaError(id + ": fewer than 2 turns after repair");
  }
  validate_corpus(c);
  return result;
}

IngestResult ingest_fed(const std::filesystem::path& path) { return ingest_fed_text(read_file(path)); }

}  // namespace dialeval
