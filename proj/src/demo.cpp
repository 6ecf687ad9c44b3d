#include "dialeval/demo.hpp"

#include <array>
#include <map>

#include "dialeval/errors.hpp"
#include "dialeval/playengine.hpp"
#include "dialeval/promptkit.hpp"
#include "dialeval/scorer.hpp"

namespace dialeval {

namespace {

struct DemoScenario {
  Scenario scenario;
  std::vector<std::string> speaker_lines;  // scripted follow-ups, one per later round
};

Scenario make_scenario(const char* id, const char* emotion, Polarity p, const char* situation,
                       const char* opener) {
  return Scenario{id, emotion, p, situation, opener};
}

const std::vector<DemoScenario>& bundled() {
  const auto pos = Polarity::Positive;
  const auto neg = Polarity::Negative;
  static const std::vector<DemoScenario> all = {
      {make_scenario("pos-1-proud", "proud", pos, "my daughter graduated from college with honors",
                     "My daughter just graduated with honors and I am so proud of her!"),
       {" She worked so hard for it, and the ceremony was beautiful.",
        " We are having a small dinner with the family tonight."}},
      {make_scenario("pos-2-grateful", "grateful", pos,
                     "my neighbors helped me repair my roof after the storm",
                     "My neighbors spent the whole weekend fixing my roof, I am so grateful."),
       {" They just showed up with tools on Saturday morning.",
        " I want to bake them something to say thanks."}},
      {make_scenario("pos-3-excited", "excited", pos, "I am starting a new job next week",
                     "I just got a new job and I start next week, I'm so excited!"),
       {" It's a design role at a small studio downtown.", " Mostly meeting the team and learning the tools."}},
      {make_scenario("pos-4-hopeful", "hopeful", pos, "I sent my first novel to a literary agent",
                     "I sent my first novel to an agent today and I feel hopeful."),
       {" It took me three years to finish the draft.", " My sister read it first and she loved it."}},
      {make_scenario("neg-1-sad", "sad", neg, "my old dog died last month",
                     "My old dog died last month and I still feel so sad."),
       {" He was with me for fourteen years.", " The house is just very quiet now."}},
      {make_scenario("neg-2-afraid", "afraid", neg, "I heard strange noises outside my house at night",
                     "I heard strange noises outside last night and I was really scared."),
       {" It sounded like someone walking around the back door.", " I called my brother and he came over."}},
      {make_scenario("neg-3-angry", "angry", neg, "someone scratched my car in a parking lot",
                     "Someone scratched my car in the parking lot and I am so angry."),
       {" They didn't even leave a note.", " I will have to pay for the repair myself."}},
      {make_scenario("neg-4-disappointed", "disappointed", neg,
                     "my manager gave the role I wanted to someone else",
                     "I worked hard all year but my manager picked someone else, I'm so disappointed."),
       {" I had been preparing for that role since January.", " I might talk to my manager about it next week."}},
  };
  return all;
}

std::size_t index_within_polarity(const std::string& scenario_id) {
  std::map<Polarity, std::size_t> seen;
  for (const auto& s : bundled()) {
    if (s.scenario.scenario_id == scenario_id) return seen[s.scenario.polarity];
    ++seen[s.scenario.polarity];
  }
  throw LinkError("not a demo scenario: '" + scenario_id + "'");
}

const std::string kGood = "Good";
const std::string kOkay = "Okay";
const std::string kBad = "Bad";

}  // namespace

const std::vector<Scenario>& demo_scenarios() {
  static const std::vector<Scenario> out = [] {
    std::vector<Scenario> v;
    for (const auto& s : bundled()) v.push_back(s.scenario);
    return v;
  }();
  return out;
}

const std::string& demo_judge_label(const std::string& bot_id, Polarity polarity, std::size_t k) {
  using Row = std::array<const std::string*, 4>;
  static const std::map<std::pair<std::string, Polarity>, Row> table = {
      {{"GoodBot", Polarity::Positive}, {&kGood, &kGood, &kGood, &kGood}},
      {{"GoodBot", Polarity::Negative}, {&kGood, &kGood, &kOkay, &kGood}},
      {{"TemplateListenerBot", Polarity::Positive}, {&kOkay, &kGood, &kOkay, &kOkay}},
      {{"TemplateListenerBot", Polarity::Negative}, {&kGood, &kOkay, &kOkay, &kGood}},
      {{"EchoBot", Polarity::Positive}, {&kOkay, &kBad, &kBad, &kOkay}},
      {{"EchoBot", Polarity::Negative}, {&kBad, &kBad, &kOkay, &kBad}},
      {{"BadBot", Polarity::Positive}, {&kBad, &kBad, &kBad, &kBad}},
      {{"BadBot", Polarity::Negative}, {&kBad, &kBad, &kBad, &kBad}},
  };
  auto it = table.find({bot_id, polarity});
  if (it == table.end() || k >= 4) throw LinkError("no demo judgement for '" + bot_id + "'");
  return *it->second[k];
}

DemoResult run_demo(const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  DemoResult result;

  std::map<std::string, Scenario> scenarios;
  BatchPlan plan;
  plan.run_id = "demo";
  for (const auto& s : bundled()) {
    scenarios.emplace(s.scenario.scenario_id, s.scenario);
    plan.scenario_ids.push_back(s.scenario.scenario_id);
  }
  std::map<std::string, BotPtr> bots;
  for (const auto& d : list_builtin_bots()) {
    bots.emplace(d.bot_id, make_bot(d));
    plan.bot_ids.push_back(d.bot_id);
  }

  // Sessions run in plan order (scenario-major) on one thread, so the script
  // is consumed in a fixed order.
  std::vector<std::string> play_script;
  std::vector<std::string> play_matchers;
  for (const auto& s : bundled()) {
    for (std::size_t b = 0; b < plan.bot_ids.size(); ++b) {
      for (const auto& line : s.speaker_lines) {
        play_script.push_back(line);
        play_matchers.push_back("feeling " + s.scenario.emotion_label + " because " +
                                s.scenario.situation_text);
      }
    }
  }
  auto speaker = scripted_provider(play_script, play_matchers);
  BatchResult batch = run_batch(plan, scenarios, bots, *speaker);
  if (!batch.failures.empty()) {
    throw Error(batch.failures.front().kind, "demo session failed: " + batch.failures.front().message);
  }
  batch.require_balanced();
  if (speaker->remaining() != 0) throw Error("ScriptMismatch", "demo play script not fully consumed");
  result.manifest = batch_manifest(plan, batch, speaker->fingerprint());

  Corpus corpus = std::move(batch.corpus);
  corpus.scale = ieval_scale();
  for (const auto& [id, d] : corpus.dialogs) {
    const Scenario& s = corpus.scenario_of(d);
    corpus.annotations[id] =
        GroundTruthAnnotation{id, demo_judge_label(d.bot_id, s.polarity, index_within_polarity(s.scenario_id)), {}};
  }

  // Scoring visits dialogs in id order; every design sees the same verdicts.
  const Banks& banks = builtin_banks();
  const Verbalizer verbalizer(ieval_scale());
  for (const auto& design : all_designs()) {
    PromptConfig config = make_prompt_config(design, ieval_scale(), "ieval", "ieval");
    std::vector<std::string> verdicts;
    std::vector<std::string> matchers;
    for (const auto& [id, d] : corpus.dialogs) {
      const Scenario& s = corpus.scenario_of(d);
      verdicts.push_back(" " + demo_judge_label(d.bot_id, s.polarity, index_within_polarity(s.scenario_id)) + ".");
      matchers.push_back("Speaker: " + d.turns.at(0).text + "\nListener: " + d.turns.at(1).text + "\n");
    }
    auto judge = scripted_provider(verdicts, matchers);
    ScoreRun run = score_corpus(corpus, config, banks, *judge);
    if (!run.failures.empty()) {
      throw Error(run.failures.front().kind, "demo scoring failed: " + run.failures.front().message);
    }
    corpus.scores.insert(corpus.scores.end(), run.scores.begin(), run.scores.end());

    AggregateResult machine = aggregate(run.scores, corpus, Grouping::BotPolarity);
    AggregateResult human = aggregate_ground_truth(corpus, verbalizer, Grouping::BotPolarity);
    result.correlations.emplace(design, correlate(rating_map(machine.ratings), rating_map(human.ratings),
                                                  CorrelationLevel::System));
    result.ratings.emplace(design, std::move(machine));
  }

  KeywordAnnotator annotator;
  AnnotationRun annotated = annotate_corpus(corpus, annotator);
  if (!annotated.failures.empty()) throw AnnotatorError(annotated.failures.front().message);
  corpus.turn_annotations = annotated.annotations;
  result.listener_flows = compute_flows(corpus.turn_annotations, corpus, Role::Listener);
  result.speaker_flows = compute_flows(corpus.turn_annotations, corpus, Role::Speaker);
  validate_corpus(corpus);

  auto emit = [&](const std::string& name, const std::string& content) {
    auto path = out_dir / name;
    write_file(path, content);
    result.files.push_back(path);
  };
  emit("corpus.jsonl", serialize_corpus(corpus));
  emit("manifest.json", result.manifest);

  std::string ranking_txt;
  std::string ranking_jsonl;
  std::string correlation_txt;
  std::string correlation_jsonl;
  for (const auto& design : all_designs()) {
    const std::string fp = make_prompt_config(design, ieval_scale(), "ieval", "ieval").fingerprint();
    auto ranked = rank(result.ratings.at(design).ratings);
    if (!ranking_txt.empty()) ranking_txt += "\n";
    ranking_txt += ranking_report(ranked, design + " (bot-polarity)");
    ranking_jsonl += ranking_records(ranked, fp);
    const auto& corr = result.correlations.at(design);
    if (!correlation_txt.empty()) correlation_txt += "\n";
    correlation_txt += correlation_text(corr.report, design);
    correlation_jsonl += correlation_record(corr.report, fp);
    emit("scatter-" + design + ".tsv", scatter_table(corr.points));
  }
  emit("ranking.txt", ranking_txt);
  emit("ranking.jsonl", ranking_jsonl);
  emit("correlation.txt", correlation_txt);
  emit("correlation.jsonl", correlation_jsonl);
  emit("sankey-listener.json", sankey_json(result.listener_flows.edges));
  emit("sankey-speaker.json", sankey_json(result.speaker_flows.edges));

  result.corpus = std::move(corpus);
  return result;
}

}  // namespace dialeval
