#include <doctest.h>

#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "dialeval/cli.hpp"
#include "dialeval/errors.hpp"
#include "dialeval/promptkit.hpp"

using namespace dialeval;
using namespace dialeval::cli;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / "dialeval-test-cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_script(const fs::path& p, const std::vector<std::string>& replies) {
  write_file(p, nlohmann::json(replies).dump());
}

RunConfig scripted(const fs::path& script) {
  RunConfig c;
  ProviderSpec spec;
  spec.kind = "scripted";
  spec.script = script;
  c.provider = spec;
  return c;
}

// Four positive and four negative scenarios.
Corpus scenario_corpus() {
  Corpus c;
  const char* emotions[] = {"proud", "joyful", "excited", "grateful", "sad", "afraid", "angry", "lonely"};
  for (int i = 0; i < 8; ++i) {
    Scenario s;
    s.scenario_id = "s" + std::to_string(i);
    s.emotion_label = emotions[i];
    s.polarity = i < 4 ? Polarity::Positive : Polarity::Negative;
    s.situation_text = "something happened to me";
    s.opener_text = "Guess what happened to me today.";
    c.scenarios[s.scenario_id] = s;
  }
  return c;
}

struct Streams {
  std::ostringstream out;
  std::ostringstream err;
};

}  // namespace

TEST_CASE("config parsing") {
  auto c = parse_run_config(R"({
    "run_id": "r1",
    "provider": {"kind": "http", "model": "m", "credential_env": "MY_KEY", "max_attempts": 2, "rate_limit": 3},
    "session": {"turns_per_side": 2},
    "prompt": {"designs": ["fs", "zs+instr"], "scale": "fed-5", "demo_bank": "fed", "instruction_bank": "fed"},
    "grouping": "bot", "level": "dialog", "method": "pearson", "role": "all",
    "concurrency": 3, "strict": false
  })");
  CHECK(c.run_id == "r1");
  REQUIRE(c.provider);
  CHECK(c.provider->http.model == "m");
  CHECK(c.provider->http.credential_env == "MY_KEY");
  CHECK(c.provider->http.retry.max_attempts == 2);
  CHECK(*c.provider->http.rate_limit == 3);
  CHECK(c.session.turns_per_side == 2);
  CHECK(c.designs == std::vector<std::string>{"fs", "zs+instr"});
  CHECK(c.scale == "fed-5");
  CHECK(c.grouping == Grouping::Bot);
  CHECK(c.level == CorrelationLevel::Dialog);
  CHECK(c.method == CorrelationMethod::Pearson);
  CHECK_FALSE(c.role.has_value());
  CHECK(c.concurrency == 3);
  CHECK_FALSE(c.strict);

  auto d = parse_run_config("{}");
  CHECK(d.strict);
  CHECK(d.role == Role::Listener);
  CHECK(d.grouping == Grouping::BotPolarity);

  CHECK_THROWS_AS(parse_run_config(R"({"colour": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"session": {"turns": 2}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"provider": {"kind": "carrier-pigeon"}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"provider": {"kind": "scripted"}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"prompt": {"designs": ["two-shot"]}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"concurrency": 0})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"concurrency": "many"})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"role": "narrator"})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("not json"), ConfigError);
}

TEST_CASE("config paths are relative to the file") {
  auto dir = fresh_dir("paths");
  write_file(dir / "run.json",
             R"({"corpus": "c.jsonl", "out": "/abs/o.jsonl", "provider": {"kind": "scripted", "script": "s.json"}})");
  auto c = load_run_config(dir / "run.json");
  CHECK(c.corpus == dir / "c.jsonl");
  CHECK(c.out == fs::path("/abs/o.jsonl"));
  CHECK(c.provider->script == dir / "s.json");
}

TEST_CASE("scripted provider files") {
  auto dir = fresh_dir("script");
  write_file(dir / "obj.json", R"({"responses": ["a", "b"], "matchers": ["x", ""]})");
  ProviderSpec spec;
  spec.kind = "scripted";
  spec.script = dir / "obj.json";
  auto p = make_provider(spec);
  CHECK_THROWS_AS(p->complete({"no match", 4, 0, {}}), PromptMismatch);
  write_file(dir / "bad.json", R"({"replies": []})");
  spec.script = dir / "bad.json";
  CHECK_THROWS_AS(make_provider(spec), ConfigError);
}

TEST_CASE("play, score, rank, annotate, flows, validate end to end") {
  auto dir = fresh_dir("e2e");
  save_corpus(scenario_corpus(), dir / "scenarios.jsonl");

  // play: 8 scenarios x 4 built-in bots, one scripted speaker follow-up each
  write_script(dir / "play.json", std::vector<std::string>(32, "Yes, it really was."));
  RunConfig play = scripted(dir / "play.json");
  play.corpus = dir / "scenarios.jsonl";
  play.out = dir / "dialogs.jsonl";
  play.session.turns_per_side = 2;
  {
    Streams s;
    CHECK(cmd_play(play, s.out, s.err) == kExitOk);
    CHECK(s.out.str().find("dialogs: 32 (0 failed)") != std::string::npos);
  }
  CHECK(fs::exists(dir / "dialogs.jsonl.manifest.json"));
  Corpus played = load_corpus(dir / "dialogs.jsonl");
  CHECK(played.dialogs.size() == 32);
  CHECK(played.scenarios.size() == 8);

  // resuming needs no further provider calls
  write_script(dir / "empty-play.json", {"unused"});
  RunConfig resume = play;
  resume.provider->script = dir / "empty-play.json";
  {
    Streams s;
    CHECK(cmd_play(resume, s.out, s.err) == kExitOk);
  }
  CHECK(load_corpus(dir / "dialogs.jsonl") == played);

  // score: all four designs over 32 dialogs
  std::vector<std::string> verdicts;
  for (int i = 0; i < 128; ++i) verdicts.push_back(i % 3 == 0 ? " Good." : i % 3 == 1 ? " Okay." : " Bad.");
  write_script(dir / "score.json", verdicts);
  RunConfig score = scripted(dir / "score.json");
  score.corpus = dir / "dialogs.jsonl";
  {
    Streams s;
    CHECK(cmd_score(score, s.out, s.err) == kExitOk);
  }
  Corpus scored = load_corpus(dir / "dialogs.jsonl");
  CHECK(scored.scores.size() == 128);

  // a second sweep keeps every score and asks for nothing
  score.provider->script = dir / "empty-play.json";
  {
    Streams s;
    CHECK(cmd_score(score, s.out, s.err) == kExitOk);
    CHECK(s.out.str().find("scored 0, kept 32") != std::string::npos);
  }
  CHECK(load_corpus(dir / "dialogs.jsonl").scores.size() == 128);

  // rank needs a single config once several are present
  RunConfig rank_cfg;
  rank_cfg.corpus = dir / "dialogs.jsonl";
  {
    Streams s;
    CHECK_THROWS_AS(cmd_rank(rank_cfg, s.out, s.err), ConfigError);
  }
  rank_cfg.designs = {"fs+instr"};
  rank_cfg.records = dir / "ranking.jsonl";
  {
    Streams s;
    CHECK(cmd_rank(rank_cfg, s.out, s.err) == kExitOk);
    CHECK(s.out.str().find("GoodBot/positive") != std::string::npos);
  }
  CHECK(fs::file_size(dir / "ranking.jsonl") > 0);

  // annotate + flows
  RunConfig ann;
  ann.corpus = dir / "dialogs.jsonl";
  ann.concurrency = 4;
  {
    Streams s;
    CHECK(cmd_annotate(ann, s.out, s.err) == kExitOk);
  }
  CHECK(load_corpus(dir / "dialogs.jsonl").turn_annotations.size() == 32 * 4);
  RunConfig flows;
  flows.corpus = dir / "dialogs.jsonl";
  flows.out = dir / "sankey.json";
  {
    Streams s;
    CHECK(cmd_flows(flows, s.out, s.err) == kExitOk);
    CHECK(s.out.str().find("dialogs: 32, stages: 1") != std::string::npos);
  }
  auto sankey = nlohmann::json::parse(read_file(dir / "sankey.json"));
  std::size_t total = 0;
  for (const auto& l : sankey["links"]) total += l["value"].get<std::size_t>();
  CHECK(total == 32);

  RunConfig val;
  val.corpus = dir / "dialogs.jsonl";
  {
    Streams s;
    CHECK(cmd_validate(val, s.out, s.err) == kExitOk);
    CHECK(s.out.str().find("32 dialogs") != std::string::npos);
  }
}

TEST_CASE("strict scoring stops with exit 1 and names the failures") {
  auto dir = fresh_dir("strict");
  Corpus c = scenario_corpus();
  for (const char* id : {"a", "b"}) {
    Dialog d;
    d.dialog_id = id;
    d.scenario_id = "s0";
    d.bot_id = "X";
    d.source = Source::Synthetic;
    d.append(Role::Speaker, "Guess what happened to me today.");
    d.append(Role::Listener, "What?");
    c.dialogs[id] = d;
  }
  save_corpus(c, dir / "c.jsonl");
  write_script(dir / "s.json", {" Good.", " banana", " Good.", " Good."});
  RunConfig cfg = scripted(dir / "s.json");
  cfg.corpus = dir / "c.jsonl";
  cfg.designs = {"zs"};
  Streams s;
  CHECK(cmd_score(cfg, s.out, s.err) == kExitFatal);
  CHECK(s.err.str().find("failed dialogs: b") != std::string::npos);
  // the good score survives
  CHECK(load_corpus(dir / "c.jsonl").scores.size() == 1);

  cfg.strict = false;
  cfg.provider->script = dir / "s.json";
  write_script(dir / "s.json", {" banana"});
  Streams s2;
  CHECK(cmd_score(cfg, s2.out, s2.err) == kExitWarnings);
}

TEST_CASE("correlate at both levels") {
  auto dir = fresh_dir("correlate");
  Corpus c = scenario_corpus();
  c.scale = ieval_scale();
  const std::string fp = make_prompt_config("fs", ieval_scale(), "ieval", "ieval").fingerprint();
  const char* labels[] = {"Bad", "Okay", "Good"};
  int k = 0;
  for (const char* bot : {"A", "B", "C"}) {
    for (const auto& [sid, _] : c.scenarios) {
      Dialog d;
      d.dialog_id = sid + "__" + bot;
      d.scenario_id = sid;
      d.bot_id = bot;
      d.source = Source::Synthetic;
      d.append(Role::Speaker, "Guess what happened to me today.");
      d.append(Role::Listener, "Tell me more.");
      c.dialogs[d.dialog_id] = d;
      const std::string human = labels[(k + (bot[0] - 'A')) % 3];
      const std::string machine = labels[(k / 2 + (bot[0] - 'A')) % 3];
      c.annotations[d.dialog_id] = {d.dialog_id, human, {}};
      c.scores.push_back({d.dialog_id, machine, Verbalizer(ieval_scale())(machine), " " + machine, fp});
      ++k;
    }
  }
  save_corpus(c, dir / "c.jsonl");

  RunConfig cfg;
  cfg.corpus = dir / "c.jsonl";
  cfg.scatter = dir / "scatter.tsv";
  cfg.records = dir / "corr.jsonl";
  Streams s;
  CHECK(cmd_correlate(cfg, s.out, s.err) == kExitOk);
  CHECK(s.out.str().find("pearson") != std::string::npos);
  CHECK(read_file(dir / "scatter.tsv").rfind("id\tmachine\thuman\n", 0) == 0);

  cfg.level = CorrelationLevel::Dialog;
  Streams s2;
  CHECK(cmd_correlate(cfg, s2.out, s2.err) == kExitOk);
  CHECK(s2.out.str().find("spearman") != std::string::npos);

  RunConfig human;
  human.corpus = dir / "c.jsonl";
  human.human = true;
  Streams s3;
  CHECK(cmd_rank(human, s3.out, s3.err) == kExitOk);
  CHECK(s3.out.str().find("human ratings") != std::string::npos);
}

TEST_CASE("ingest and guarded errors") {
  auto dir = fresh_dir("ingest");
  write_file(dir / "fed.json",
             R"([{"context":"User: Hi!\nSystem: Hello!","system":"Bot","annotations":{"Overall":[3,4]}}])");
  RunConfig cfg;
  cfg.corpus = dir / "fed.json";
  cfg.out = dir / "fed.jsonl";
  Streams s;
  CHECK(cmd_ingest("fed", cfg, s.out, s.err) == kExitOk);
  CHECK(load_corpus(dir / "fed.jsonl").dialogs.size() == 1);

  Streams g;
  int code = run_guarded([&] { return cmd_ingest("csv", cfg, g.out, g.err); }, g.err);
  CHECK(code == kExitFatal);
  CHECK(g.err.str().rfind("error [ConfigError]", 0) == 0);

  RunConfig missing;
  missing.corpus = dir / "nope.jsonl";
  Streams m;
  CHECK(run_guarded([&] { return cmd_validate(missing, m.out, m.err); }, m.err) == kExitFatal);
}
