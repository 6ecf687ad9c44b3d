#include "dialeval/discourse.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <set>
#include <thread>

#include <json.hpp>

#include "dialeval/errors.hpp"
#include "dialeval/text.hpp"

namespace dialeval {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

struct Rule {
  std::vector<std::string_view> needles;
  const char* label;
};

const std::vector<Rule>& keyword_rules() {
  static const std::vector<Rule> rules = {
      {{"?"}, "Questioning"},
      {{"sorry"}, "Sympathizing"},
      {{"i see", "i understand", "for sharing"}, "Acknowledging"},
      {{"thank"}, "Grateful"},
      {{"happy", "glad", "excited", "proud", "great", "awesome", "wonderful", "love"}, "Joyful"},
      {{"sad", "upset", "devastated", "lonely", "miss", "disappointed", "lost"}, "Sad"},
      {{"afraid", "scared", "worried", "nervous", "terrified"}, "Afraid"},
      {{"angry", "furious", "annoyed", "mad"}, "Angry"},
  };
  return rules;
}

}  // namespace

const std::vector<std::string>& KeywordAnnotator::taxonomy() const {
  static const std::vector<std::string> labels = {"Questioning", "Sympathizing", "Acknowledging",
                                                  "Grateful",    "Joyful",       "Sad",
                                                  "Afraid",      "Angry",        "Neutral"};
  return labels;
}

TurnLabel KeywordAnnotator::annotate(const Dialog&, const Turn& turn) {
  const std::string folded = text::casefold(turn.text);
  for (const auto& rule : keyword_rules()) {
    for (auto needle : rule.needles) {
      if (text::contains(folded, needle)) return {rule.label, 1.0};
    }
  }
  return {"Neutral", 1.0};
}

SubprocessAnnotator::SubprocessAnnotator(std::string command, std::vector<std::string> taxonomy)
    : command_(std::move(command)), taxonomy_(std::move(taxonomy)) {
  if (command_.empty()) throw ConfigError("annotator command is empty");
  if (taxonomy_.empty()) throw ConfigError("annotator taxonomy is empty");
}

TurnLabel SubprocessAnnotator::annotate(const Dialog& dialog, const Turn& turn) {
  ojson req;
  req["kind"] = "annotate_request";
  req["dialog_id"] = dialog.dialog_id;
  req["turn"] = turn.index;
  req["role"] = to_string(turn.role);
  req["text"] = turn.text;

  std::string line;
  {
    std::lock_guard lock(mu_);
    try {
      if (!process_) process_ = std::make_unique<LineProcess>(command_);
      line = process_->exchange(req.dump());
    } catch (const IoError& e) {
      process_.reset();
      throw AnnotatorError(std::string("annotator process failed: ") + e.what());
    }
  }
  TurnLabel out;
  try {
    json j = json::parse(line);
    out.label = j.at("label").get<std::string>();
    if (j.contains("confidence")) out.confidence = j["confidence"].get<double>();
  } catch (const json::exception& e) {
    throw AnnotatorError(std::string("bad annotator reply: ") + e.what());
  }
  if (!(out.confidence >= 0 && out.confidence <= 1)) {
    throw AnnotatorError("annotator confidence outside [0, 1]");
  }
  return out;
}

AnnotationRun annotate_corpus(const Corpus& corpus, Annotator& annotator, int concurrency) {
  struct Job {
    const Dialog* dialog;
    const Turn* turn;
  };
  std::vector<Job> jobs;
  for (const auto& [_, d] : corpus.dialogs) {
    for (const auto& t : d.turns) jobs.push_back({&d, &t});
  }
  const auto& taxonomy = annotator.taxonomy();
  const std::set<std::string> allowed(taxonomy.begin(), taxonomy.end());

  std::vector<std::optional<TurnAnnotation>> done(jobs.size());
  std::vector<std::optional<AnnotationFailure>> failed(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const auto& [d, t] = jobs[i];
      try {
        TurnLabel l = annotator.annotate(*d, *t);
        if (!allowed.count(l.label)) {
          throw AnnotatorError("label '" + l.label + "' is not in the annotator taxonomy");
        }
        done[i] = TurnAnnotation{d->dialog_id, t->index, l.label, l.confidence};
      } catch (const Error& e) {
        failed[i] = AnnotationFailure{d->dialog_id, t->index, e.what()};
      }
    }
  };
  const int threads = std::max(1, std::min<int>(concurrency, static_cast<int>(jobs.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  AnnotationRun run;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (done[i]) run.annotations.push_back(std::move(*done[i]));
    if (failed[i]) run.failures.push_back(std::move(*failed[i]));
  }
  return run;
}

FlowResult compute_flows(std::span<const TurnAnnotation> annotations, const Corpus& corpus,
                         std::optional<Role> role) {
  std::map<std::pair<std::string, std::size_t>, const TurnAnnotation*> by_turn;
  for (const auto& a : annotations) {
    if (!corpus.dialogs.count(a.dialog_id)) {
      throw LinkError("annotation refers to unknown dialog '" + a.dialog_id + "'");
    }
    if (!by_turn.emplace(std::make_pair(a.dialog_id, a.turn_index), &a).second) {
      throw SchemaError("turn " + std::to_string(a.turn_index) + " of dialog '" + a.dialog_id +
                        "' is annotated twice");
    }
  }

  FlowResult result;
  std::vector<std::vector<std::string>> sequences;
  for (const auto& [id, d] : corpus.dialogs) {
    std::vector<std::string> seq;
    for (const auto& t : d.turns) {
      if (role && t.role != *role) continue;
      auto it = by_turn.find({id, t.index});
      if (it == by_turn.end()) {
        throw IncompleteAnnotations("dialog '" + id + "' has no annotation for turn " +
                                    std::to_string(t.index));
      }
      seq.push_back(it->second->label);
    }
    sequences.push_back(std::move(seq));
  }
  result.dialogs = sequences.size();
  if (sequences.empty()) return result;

  std::size_t shortest = sequences.front().size();
  std::size_t longest = shortest;
  for (const auto& s : sequences) {
    shortest = std::min(shortest, s.size());
    longest = std::max(longest, s.size());
  }
  if (shortest != longest) {
    result.warnings.push_back("ragged dialogs: sequences truncated from up to " +
                              std::to_string(longest) + " to " + std::to_string(shortest) + " labels");
  }
  result.length = shortest;
  if (shortest < 2) {
    result.warnings.push_back("sequences shorter than two labels produce no flows");
    return result;
  }

  std::map<std::tuple<std::size_t, std::string, std::string>, std::size_t> counts;
  for (const auto& s : sequences) {
    for (std::size_t t = 0; t + 1 < shortest; ++t) ++counts[{t, s[t], s[t + 1]}];
  }
  for (const auto& [key, w] : counts) {
    result.edges.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), w});
  }
  return result;
}

std::string sankey_json(std::span<const FlowEdge> edges, std::size_t min_weight) {
  std::vector<const FlowEdge*> kept;
  for (const auto& e : edges) {
    if (e.weight >= min_weight) kept.push_back(&e);
  }
  std::sort(kept.begin(), kept.end(), [](const FlowEdge* a, const FlowEdge* b) {
    return std::tie(a->stage, a->from_label, a->to_label) < std::tie(b->stage, b->from_label, b->to_label);
  });

  std::set<std::pair<std::size_t, std::string>> node_set;
  for (const auto* e : kept) {
    node_set.insert({e->stage, e->from_label});
    node_set.insert({e->stage + 1, e->to_label});
  }
  std::map<std::pair<std::size_t, std::string>, std::size_t> index;
  ojson nodes = ojson::array();
  for (const auto& n : node_set) {
    index[n] = nodes.size();
    nodes.push_back({{"name", n.second + "@" + std::to_string(n.first)}, {"label", n.second}, {"stage", n.first}});
  }
  ojson links = ojson::array();
  for (const auto* e : kept) {
    links.push_back({{"source", index.at({e->stage, e->from_label})},
                     {"target", index.at({e->stage + 1, e->to_label})},
                     {"value", e->weight}});
  }
  ojson doc;
  doc["nodes"] = std::move(nodes);
  doc["links"] = std::move(links);
  return doc.dump(2) + "\n";
}

void export_sankey(std::span<const FlowEdge> edges, const std::filesystem::path& path, std::size_t min_weight) {
  write_file(path, sankey_json(edges, min_weight));
}

}  // namespace dialeval
