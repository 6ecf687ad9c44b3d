#include <doctest.h>

#include <algorithm>

#include <filesystem>

#include "dialeval/corpus.hpp"
#include "dialeval/errors.hpp"

using namespace dialeval;

namespace {

Corpus small_corpus() {
  Corpus c;
  c.scale = ieval_scale();
  c.scenarios["s1"] = Scenario{"s1", "proud", Polarity::Positive, "I won a race", "I won the race today!"};
  c.scenarios["s2"] = Scenario{"s2", "sad", Polarity::Negative, "my cat is ill", "My cat is sick."};
  Dialog d;
  d.dialog_id = "d1";
  d.scenario_id = "s1";
  d.bot_id = "B";
  d.source = Source::Synthetic;
  d.append(Role::Speaker, "I won the race today!");
  d.append(Role::Listener, "Congratulations!");
  c.dialogs["d1"] = d;
  d.dialog_id = "d2";
  d.scenario_id = "s2";
  d.turns.clear();
  d.append(Role::Speaker, "My cat is sick.");
  d.append(Role::Listener, "  I'm   sorry. ");
  c.dialogs["d2"] = d;
  c.annotations["d1"] = GroundTruthAnnotation{"d1", "Good", {{"empathy", 4.5}}};
  c.scores.push_back({"d2", "Okay", 2, " Okay", "cfg-b"});
  c.scores.push_back({"d1", "Good", 3, " Good", "cfg-a"});
  c.turn_annotations.push_back({"d1", 1, "Grateful", 0.75});
  c.turn_annotations.push_back({"d1", 0, "Joyful", 1.0});
  return c;
}

std::filesystem::path temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "dialeval-test-corpus";
  std::filesystem::create_directories(dir);
  auto p = dir / name;
  std::filesystem::remove(p);
  return p;
}

}  // namespace

TEST_CASE("append normalizes and indexes turns") {
  Dialog d;
  d.append(Role::Speaker, "  hi   there ");
  d.append(Role::Listener, "yo");
  CHECK(d.turns[0].text == "hi there");
  CHECK(d.turns[1].index == 1);
}

TEST_CASE("serialize/parse round trip is exact and canonical") {
  Corpus c = small_corpus();
  std::string text = serialize_corpus(c);
  Corpus back = parse_corpus(text);
  CHECK(back.scale == c.scale);
  CHECK(back.scenarios == c.scenarios);
  CHECK(back.dialogs == c.dialogs);
  CHECK(back.annotations == c.annotations);
  CHECK(back.scores.size() == 2);
  CHECK(back.scores[0].config_fingerprint == "cfg-a");
  CHECK(back.turn_annotations[0].turn_index == 0);
  CHECK(serialize_corpus(back) == text);
  CHECK(text.rfind("{\"kind\":\"header\"", 0) == 0);
}

TEST_CASE("save and load through a file") {
  auto p = temp_path("rt.jsonl");
  Corpus c = small_corpus();
  save_corpus(c, p);
  Corpus back = load_corpus(p);
  CHECK(serialize_corpus(back) == serialize_corpus(c));
  CHECK_THROWS_AS(load_corpus(temp_path("missing.jsonl")), IoError);
}

TEST_CASE("schema errors carry line numbers") {
  const std::string header = R"({"kind":"header","format":"dialeval-corpus","version":1})";
  SUBCASE("malformed json") {
    try {
      parse_corpus(header + "\n{not json}\n");
      FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("unknown kind") {
    try {
      parse_corpus(header + "\n" + R"({"kind":"mystery"})" + "\n");
      FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
      CHECK(e.line() == 2);
      CHECK(std::string(e.what()).find("mystery") != std::string::npos);
    }
  }
  SUBCASE("header must come first") {
    CHECK_THROWS_AS(parse_corpus(R"({"kind":"scale","name":"x","labels":["a"],"values":[1]})"
                                 "\n" + header + "\n"),
                    SchemaError);
  }
  SUBCASE("alternation violation in a dialog record") {
    std::string rec = R"({"kind":"dialog","id":"d","scenario_id":"s","bot_id":"b","source":"human","turns":[{"role":"listener","text":"x"},{"role":"speaker","text":"y"}]})";
    CHECK_THROWS_AS(parse_corpus(header + "\n" + rec + "\n"), SchemaError);
  }
}

TEST_CASE("foreign record kinds are skipped") {
  Corpus c = small_corpus();
  std::string text = serialize_corpus(c);
  text += R"({"kind":"rating","system":"x","mean":1})" "\n";
  text += R"({"kind":"correlation","method":"pearson"})" "\n";
  text += R"({"kind":"manifest","run_id":"r"})" "\n";
  text += R"({"kind":"bank","type":"instructions","id":"x","entries":{}})" "\n";
  Corpus back = parse_corpus(text);
  CHECK(back.dialogs.size() == 2);
}

TEST_CASE("validate_dialog reports each rule") {
  Dialog d;
  d.dialog_id = "x";
  d.source = Source::Synthetic;
  d.turns = {{0, Role::Speaker, "a"}, {2, Role::Speaker, " b"}, {2, Role::Listener, ""}};
  auto vs = validate_dialog(d);
  auto has = [&](ViolationRule r) {
    return std::any_of(vs.begin(), vs.end(), [&](const Violation& v) { return v.rule == r; });
  };
  CHECK(has(ViolationRule::IndexMismatch));
  CHECK(has(ViolationRule::AlternationViolation));
  CHECK(has(ViolationRule::UnnormalizedText));
  CHECK(has(ViolationRule::EmptyText));
  CHECK(has(ViolationRule::OddSyntheticLength));
  Dialog one;
  one.append(Role::Speaker, "hi");
  CHECK(validate_dialog(one).front().rule == ViolationRule::TooFewTurns);
  CHECK(validate_dialog(small_corpus().dialogs.at("d1")).empty());
}

TEST_CASE("validate_corpus checks links and labels") {
  Corpus c = small_corpus();
  CHECK_NOTHROW(validate_corpus(c));
  SUBCASE("dangling scenario") {
    c.dialogs["d1"].scenario_id = "nope";
    CHECK_THROWS_AS(validate_corpus(c), LinkError);
  }
  SUBCASE("label outside scale") {
    c.annotations["d1"].overall_label = "Excellent";
    CHECK_THROWS_AS(validate_corpus(c), SchemaError);
  }
  SUBCASE("score for unknown dialog") {
    c.scores.push_back({"zz", "Good", 3, "", "cfg"});
    CHECK_THROWS_AS(validate_corpus(c), LinkError);
  }
  SUBCASE("turn annotation out of range") {
    c.turn_annotations.push_back({"d1", 9, "Neutral", 1});
    CHECK_THROWS_AS(validate_corpus(c), LinkError);
  }
}

TEST_CASE("append_records writes a header once") {
  auto p = temp_path("append.jsonl");
  Corpus c = small_corpus();
  append_records(p, {scenario_record(c.scenarios.at("s1"))});
  append_records(p, {dialog_record(c.dialogs.at("d1"))});
  Corpus back = load_corpus(p);
  CHECK(back.dialogs.size() == 1);
  CHECK(back.scenarios.size() == 1);
}

TEST_CASE("iEval adapter") {
  const std::string src = R"([
    {"conversation_id":"c1","emotion":"proud","situation":"I got promoted","polarity":"Positive",
     "bot":"Blender","turns":["I got promoted!","Congrats!","Thanks!","What's next?","A party.","Fun!"],
     "overall":"good","politeness":4,"empathy":5},
    {"conversation_id":"c2","emotion":"sad","situation":"my dog died","emotion_polarity":"negative",
     "model":"DialoGPT","turns":[{"role":"listener","text":"hello"},{"role":"speaker","text":"My dog died."},
       {"role":"speaker","text":"I miss him."},{"role":"listener","text":"Sorry."}],
     "overall":1}
  ])";
  IngestResult r = ingest_ieval_text(src);
  REQUIRE(r.corpus.dialogs.size() == 2);
  const auto& c1 = r.corpus.dialogs.at("c1");
  CHECK(c1.bot_id == "Blender");
  CHECK(c1.turns.size() == 6);
  CHECK(r.corpus.annotations.at("c1").overall_label == "Good");
  CHECK(r.corpus.annotations.at("c1").fine_grained.at("empathy") == 5);
  const auto& c2 = r.corpus.dialogs.at("c2");
  CHECK(c2.turns.size() == 2);
  CHECK(c2.turns[0].text == "My dog died. I miss him.");
  CHECK(r.corpus.annotations.at("c2").overall_label == "Bad");
  CHECK(r.corpus.scenario_of(c2).polarity == Polarity::Negative);
  CHECK(r.warnings.size() >= 3);  // leading listener, merge, short dialog

  CHECK_THROWS_AS(ingest_ieval_text(R"([{"emotion":"x","situation":"y","bot":"b","turns":["a","b"]}])"),
                  SchemaError);
  CHECK_THROWS_AS(
      ingest_ieval_text(R"([{"emotion":"x","situation":"y","polarity":"positive","bot":"b","turns":["a","b"],"empathy":9,"overall":"Good"}])"),
      SchemaError);
}

TEST_CASE("FED adapter") {
  const std::string src = R"([
    {"context":"User: Hi!\nSystem: Hello, how are you?\nUser: Fine.\nSystem: Great to hear.",
     "system":"Meena","annotations":{"Overall":[4,5,4],"Coherent":[3,3,2]}},
    {"context":"User: Hi!","response":"Hey","system":"Human","annotations":{"Interesting":[1]}},
    {"context":"User: yo\nSystem: sup","system":"Mitsuku","annotations":{"Overall":[1,2,1]}}
  ])";
  IngestResult r = ingest_fed_text(src);
  REQUIRE(r.corpus.dialogs.size() == 2);
  const auto& d = r.corpus.dialogs.at("fed-001");
  CHECK(d.bot_id == "Meena");
  CHECK(d.turns.size() == 4);
  CHECK(d.turns[1].role == Role::Listener);
  CHECK(r.corpus.annotations.at("fed-001").overall_label == "Good");  // mean 4.33
  CHECK(r.corpus.annotations.at("fed-002").overall_label == "Very bad");  // mean 1.33
  CHECK(r.corpus.annotations.at("fed-001").fine_grained.at("Coherent") == doctest::Approx(8.0 / 3));
  CHECK(r.corpus.scenario_of(d).polarity == Polarity::Unspecified);
}
