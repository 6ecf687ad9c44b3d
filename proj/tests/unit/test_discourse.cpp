#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

#include <json.hpp>

#include "dialeval/discourse.hpp"
#include "dialeval/errors.hpp"

using namespace dialeval;

namespace {

Dialog make_dialog(const std::string& id, std::initializer_list<const char*> turns) {
  Dialog d;
  d.dialog_id = id;
  d.scenario_id = "s";
  d.bot_id = "b";
  Role r = Role::Speaker;
  for (const char* t : turns) {
    d.append(r, t);
    r = r == Role::Speaker ? Role::Listener : Role::Speaker;
  }
  return d;
}

Turn turn(const char* text) { return Turn{0, Role::Listener, text}; }

Corpus with_dialogs(std::initializer_list<Dialog> ds) {
  Corpus c;
  c.scenarios["s"] = Scenario{"s", "happy", Polarity::Positive, "x", "y"};
  for (const auto& d : ds) c.dialogs[d.dialog_id] = d;
  return c;
}

std::string fake(const char* mode) { return std::string(FAKE_PROCESS) + " " + mode; }

}  // namespace

TEST_CASE("keyword rules, first match wins") {
  KeywordAnnotator k;
  Dialog d;
  CHECK(k.annotate(d, turn("Why is that?")).label == "Questioning");
  CHECK(k.annotate(d, turn("Sorry, are you sad?")).label == "Questioning");
  CHECK(k.annotate(d, turn("I'm so SORRY you are sad")).label == "Sympathizing");
  CHECK(k.annotate(d, turn("I see, that is a lot")).label == "Acknowledging");
  CHECK(k.annotate(d, turn("Thanks for sharing")).label == "Acknowledging");
  CHECK(k.annotate(d, turn("Thank you!")).label == "Grateful");
  CHECK(k.annotate(d, turn("I'm so proud of you")).label == "Joyful");
  CHECK(k.annotate(d, turn("I feel lonely")).label == "Sad");
  CHECK(k.annotate(d, turn("That was terrifying, I was scared")).label == "Afraid");
  CHECK(k.annotate(d, turn("He made me furious")).label == "Angry");
  CHECK(k.annotate(d, turn("We went to the store.")).label == "Neutral");
  CHECK(k.taxonomy().size() == 9);
}

TEST_CASE("subprocess annotator") {
  Dialog d = make_dialog("d", {"hello", "how are you?"});
  SubprocessAnnotator ok(fake("annotator"), {"Questioning", "Neutral"});
  CHECK(ok.annotate(d, d.turns[1]).label == "Questioning");
  auto n = ok.annotate(d, d.turns[0]);
  CHECK(n.label == "Neutral");
  CHECK(n.confidence == 0.5);

  SubprocessAnnotator dead(fake("die"), {"Neutral"});
  CHECK_THROWS_AS(dead.annotate(d, d.turns[0]), AnnotatorError);
  SubprocessAnnotator garbage(fake("garbage"), {"Neutral"});
  CHECK_THROWS_AS(garbage.annotate(d, d.turns[0]), AnnotatorError);
  CHECK_THROWS_AS(SubprocessAnnotator("", {"x"}), ConfigError);
}

TEST_CASE("labels outside the taxonomy are failures") {
  Corpus c = with_dialogs({make_dialog("a", {"hi", "there?"})});
  SubprocessAnnotator bogus(fake("bogus"), {"Neutral"});
  auto run = annotate_corpus(c, bogus);
  CHECK(run.annotations.empty());
  CHECK(run.failures.size() == 2);
}

TEST_CASE("annotate_corpus covers every turn in order, any concurrency") {
  Corpus c = with_dialogs({make_dialog("b", {"Hi", "Why?", "Because", "I see"}),
                           make_dialog("a", {"Thanks", "You are welcome"})});
  KeywordAnnotator k;
  auto one = annotate_corpus(c, k, 1);
  auto four = annotate_corpus(c, k, 4);
  CHECK(one.failures.empty());
  REQUIRE(one.annotations.size() == 6);
  CHECK(one.annotations == four.annotations);
  CHECK(one.annotations[0].dialog_id == "a");
  CHECK(one.annotations[0].label == "Grateful");
  CHECK(one.annotations[3].label == "Questioning");
}

TEST_CASE("hand fixture: listener-only flow is a single edge") {
  // Two dialogs whose listener turns go Questioning then Acknowledging.
  Corpus c = with_dialogs({make_dialog("d1", {"I won", "Really?", "Yes", "I see"}),
                           make_dialog("d2", {"I lost", "What happened?", "Bad luck", "I understand"})});
  KeywordAnnotator k;
  auto run = annotate_corpus(c, k);
  auto flows = compute_flows(run.annotations, c, Role::Listener);
  REQUIRE(flows.edges.size() == 1);
  CHECK(flows.edges[0] == FlowEdge{0, "Questioning", "Acknowledging", 2});
  CHECK(flows.length == 2);
  CHECK(flows.warnings.empty());

  auto doc = nlohmann::json::parse(sankey_json(flows.edges));
  CHECK(doc["nodes"].size() == 2);
  CHECK(doc["nodes"][0]["name"] == "Questioning@0");
  CHECK(doc["nodes"][1]["name"] == "Acknowledging@1");
  CHECK(doc["links"][0]["value"] == 2);
}

TEST_CASE("flow conservation over random fixtures") {
  std::mt19937 rng(21);
  const std::vector<std::string> labels = {"A", "B", "C"};
  for (int fixture = 0; fixture < 100; ++fixture) {
    Corpus c;
    std::vector<TurnAnnotation> ann;
    const int dialogs = 1 + static_cast<int>(rng() % 12);
    const std::size_t len = 2 + rng() % 6;
    for (int i = 0; i < dialogs; ++i) {
      Dialog d;
      d.dialog_id = "d" + std::to_string(i);
      for (std::size_t t = 0; t < len; ++t) {
        d.append(t % 2 ? Role::Listener : Role::Speaker, "x");
        ann.push_back({d.dialog_id, t, labels[rng() % labels.size()], 1.0});
      }
      c.dialogs[d.dialog_id] = d;
    }
    auto flows = compute_flows(ann, c);
    std::map<std::size_t, std::size_t> per_stage;
    std::map<std::pair<std::size_t, std::string>, long> balance;
    for (const auto& e : flows.edges) {
      per_stage[e.stage] += e.weight;
      balance[{e.stage + 1, e.to_label}] += static_cast<long>(e.weight);
      balance[{e.stage, e.from_label}] -= static_cast<long>(e.weight);
    }
    CHECK(per_stage.size() == len - 1);
    for (const auto& [stage, total] : per_stage) CHECK(total == static_cast<std::size_t>(dialogs));
    // interior nodes pass through everything they receive
    for (const auto& [node, b] : balance) {
      if (node.first > 0 && node.first + 1 < len) CHECK(b == 0);
    }
  }
}

TEST_CASE("flow edge cases") {
  Corpus empty;
  auto none = compute_flows({}, empty);
  CHECK(none.edges.empty());
  CHECK(none.dialogs == 0);

  Corpus c = with_dialogs({make_dialog("d1", {"a", "b", "c", "d"}), make_dialog("d2", {"a", "b"})});
  std::vector<TurnAnnotation> ann = {{"d1", 0, "X", 1}, {"d1", 1, "Y", 1}, {"d1", 2, "Z", 1},
                                     {"d1", 3, "Z", 1}, {"d2", 0, "X", 1}, {"d2", 1, "Y", 1}};
  auto ragged = compute_flows(ann, c);
  CHECK(ragged.length == 2);
  CHECK(ragged.warnings.size() == 1);
  REQUIRE(ragged.edges.size() == 1);
  CHECK(ragged.edges[0].weight == 2);

  auto listener = compute_flows(ann, c, Role::Listener);
  CHECK(listener.edges.empty());
  CHECK_FALSE(listener.warnings.empty());

  auto missing = ann;
  missing.pop_back();
  CHECK_THROWS_AS(compute_flows(missing, c), IncompleteAnnotations);
  auto dup = ann;
  dup.push_back(ann.front());
  CHECK_THROWS_AS(compute_flows(dup, c), SchemaError);
  auto stray = ann;
  stray.push_back({"zzz", 0, "X", 1});
  CHECK_THROWS_AS(compute_flows(stray, c), LinkError);
}

TEST_CASE("sankey export is deterministic and filters by weight") {
  std::vector<FlowEdge> edges = {{1, "B", "C", 1}, {0, "A", "B", 3}, {0, "A", "C", 1}};
  auto reversed = edges;
  std::reverse(reversed.begin(), reversed.end());
  CHECK(sankey_json(edges) == sankey_json(reversed));

  auto all = nlohmann::json::parse(sankey_json(edges));
  CHECK(all["nodes"].size() == 4);  // A@0 B@1 C@1 C@2, B@1 shared
  CHECK(all["links"].size() == 3);

  auto heavy = nlohmann::json::parse(sankey_json(edges, 2));
  CHECK(heavy["nodes"].size() == 2);
  CHECK(heavy["links"].size() == 1);
}
