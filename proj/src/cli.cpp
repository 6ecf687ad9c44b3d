#include "dialeval/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <set>

#include <json.hpp>

#include "dialeval/demo.hpp"
#include "dialeval/discourse.hpp"
#include "dialeval/errors.hpp"
#include "dialeval/promptkit.hpp"
#include "dialeval/scorer.hpp"

namespace dialeval::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

template <class T>
void read_opt(const json& obj, const char* key, T& dst) {
  if (obj.contains(key)) dst = obj.at(key).get<T>();
}

std::optional<Role> parse_role_filter(const std::string& s) {
  if (s == "all") return std::nullopt;
  return parse_role(s);
}

Banks resolve_banks(const RunConfig& c) {
  Banks banks = builtin_banks();
  if (c.banks) banks = merge_banks(std::move(banks), load_banks(*c.banks));
  return banks;
}

const fs::path& require_corpus(const RunConfig& c) {
  if (c.corpus.empty()) throw ConfigError("no corpus given (--corpus)");
  if (!fs::exists(c.corpus)) throw ConfigError("corpus '" + c.corpus.string() + "' does not exist");
  return c.corpus;
}

fs::path output_or_corpus(const RunConfig& c) { return c.out.empty() ? c.corpus : c.out; }

ScoreScale corpus_scale(const Corpus& corpus, const RunConfig& c, const Banks& banks) {
  return corpus.scale ? *corpus.scale : banks.scale(c.scale);
}

// Fingerprint of the scores a rank/correlate run should read.
std::string select_fingerprint(const Corpus& corpus, const RunConfig& c, const Banks& banks) {
  if (!c.designs.empty()) {
    if (c.designs.size() > 1) throw ConfigError("rank and correlate take a single --prompt-config");
    return make_prompt_config(c.designs.front(), corpus_scale(corpus, c, banks), c.demo_bank,
                              c.instruction_bank)
        .fingerprint();
  }
  std::set<std::string> present;
  for (const auto& s : corpus.scores) present.insert(s.config_fingerprint);
  if (present.empty()) throw ConfigError("corpus holds no scores");
  if (present.size() > 1) {
    std::string list;
    for (const auto& p : present) list += "\n  " + p;
    throw ConfigError("corpus holds scores for several prompt configs; pick one with --prompt-config:" + list);
  }
  return *present.begin();
}

std::vector<DialogScore> scores_for(const Corpus& corpus, const std::string& fp) {
  std::vector<DialogScore> out;
  for (const auto& s : corpus.scores) {
    if (s.config_fingerprint == fp) out.push_back(s);
  }
  if (out.empty()) throw ConfigError("corpus holds no scores for config " + fp);
  return out;
}

void maybe_write(const std::optional<fs::path>& path, const std::string& content) {
  if (path) write_file(*path, content);
}

}  // namespace

RunConfig parse_run_config(const std::string& content) {
  json j;
  try {
    j = json::parse(content);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, "config",
             {"run_id", "provider", "session", "prompt", "bots", "grouping", "level", "method", "role",
              "min_weight", "annotator", "taxonomy", "corpus", "out", "manifest", "scatter", "records",
              "concurrency", "strict", "retry_once", "allow_unbalanced"});
  RunConfig c;
  try {
    read_opt(j, "run_id", c.run_id);
    if (j.contains("provider")) {
      const auto& p = j["provider"];
      check_keys(p, "provider",
                 {"kind", "endpoint", "model", "credential_env", "timeout_ms", "max_attempts",
                  "base_backoff_ms", "max_backoff_ms", "rate_limit", "script"});
      ProviderSpec spec;
      spec.kind = p.at("kind").get<std::string>();
      if (spec.kind != "http" && spec.kind != "scripted") {
        throw ConfigError("provider.kind must be 'http' or 'scripted'");
      }
      read_opt(p, "endpoint", spec.http.endpoint);
      read_opt(p, "model", spec.http.model);
      read_opt(p, "credential_env", spec.http.credential_env);
      if (p.contains("timeout_ms")) spec.http.timeout = std::chrono::milliseconds(p["timeout_ms"].get<long>());
      read_opt(p, "max_attempts", spec.http.retry.max_attempts);
      if (p.contains("base_backoff_ms")) {
        spec.http.retry.base_backoff = std::chrono::milliseconds(p["base_backoff_ms"].get<long>());
      }
      if (p.contains("max_backoff_ms")) {
        spec.http.retry.max_backoff = std::chrono::milliseconds(p["max_backoff_ms"].get<long>());
      }
      if (p.contains("rate_limit") && !p["rate_limit"].is_null()) spec.http.rate_limit = p["rate_limit"].get<double>();
      if (p.contains("script")) spec.script = p["script"].get<std::string>();
      if (spec.kind == "scripted" && spec.script.empty()) throw ConfigError("scripted provider needs 'script'");
      c.provider = std::move(spec);
    }
    if (j.contains("session")) {
      const auto& s = j["session"];
      check_keys(s, "session", {"turns_per_side", "max_tokens", "temperature", "stop"});
      read_opt(s, "turns_per_side", c.session.turns_per_side);
      read_opt(s, "max_tokens", c.session.max_tokens);
      read_opt(s, "temperature", c.session.temperature);
      read_opt(s, "stop", c.session.stop);
    }
    if (j.contains("prompt")) {
      const auto& p = j["prompt"];
      check_keys(p, "prompt", {"designs", "scale", "demo_bank", "instruction_bank", "banks"});
      read_opt(p, "designs", c.designs);
      read_opt(p, "scale", c.scale);
      read_opt(p, "demo_bank", c.demo_bank);
      read_opt(p, "instruction_bank", c.instruction_bank);
      if (p.contains("banks")) c.banks = p["banks"].get<std::string>();
    }
    if (j.contains("bots")) {
      for (const auto& b : j["bots"]) {
        check_keys(b, "bot", {"id", "kind", "target", "reentrant", "metadata"});
        BotDescriptor d;
        d.bot_id = b.at("id").get<std::string>();
        d.kind = parse_bot_kind(b.value("kind", std::string("in-process")));
        d.target = b.at("target").get<std::string>();
        d.reentrant = b.value("reentrant", false);
        read_opt(b, "metadata", d.metadata);
        c.bots.push_back(std::move(d));
      }
    }
    if (j.contains("grouping")) c.grouping = parse_grouping(j["grouping"].get<std::string>());
    if (j.contains("level")) c.level = parse_level(j["level"].get<std::string>());
    if (j.contains("method")) c.method = parse_method(j["method"].get<std::string>());
    if (j.contains("role")) c.role = parse_role_filter(j["role"].get<std::string>());
    read_opt(j, "min_weight", c.min_weight);
    read_opt(j, "annotator", c.annotator);
    read_opt(j, "taxonomy", c.taxonomy);
    if (j.contains("corpus")) c.corpus = j["corpus"].get<std::string>();
    if (j.contains("out")) c.out = j["out"].get<std::string>();
    if (j.contains("manifest")) c.manifest = j["manifest"].get<std::string>();
    if (j.contains("scatter")) c.scatter = j["scatter"].get<std::string>();
    if (j.contains("records")) c.records = j["records"].get<std::string>();
    read_opt(j, "concurrency", c.concurrency);
    read_opt(j, "strict", c.strict);
    read_opt(j, "retry_once", c.retry_once);
    read_opt(j, "allow_unbalanced", c.allow_unbalanced);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  } catch (const SchemaError& e) {
    throw ConfigError(e.what());
  }
  if (c.concurrency < 1) throw ConfigError("concurrency must be >= 1");
  for (const auto& d : c.designs) make_prompt_config(d, ieval_scale(), "", "");
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  RunConfig c = parse_run_config(read_file(path));
  // Relative paths in the file are relative to the file.
  const fs::path base = path.parent_path();
  auto rebase = [&](fs::path& p) {
    if (!p.empty() && p.is_relative()) p = base / p;
  };
  auto rebase_opt = [&](std::optional<fs::path>& p) {
    if (p) rebase(*p);
  };
  rebase(c.corpus);
  rebase(c.out);
  rebase_opt(c.manifest);
  rebase_opt(c.scatter);
  rebase_opt(c.records);
  rebase_opt(c.banks);
  if (c.provider) rebase(c.provider->script);
  return c;
}

ProviderPtr make_provider(const ProviderSpec& spec) {
  if (spec.kind == "http") return http_provider(spec.http);
  if (spec.kind != "scripted") throw ConfigError("unknown provider kind '" + spec.kind + "'");
  json j;
  try {
    j = json::parse(read_file(spec.script));
  } catch (const json::exception& e) {
    throw ConfigError("script '" + spec.script.string() + "' is not valid JSON: " + e.what());
  }
  std::vector<std::string> responses;
  std::vector<std::string> matchers;
  try {
    if (j.is_array()) {
      responses = j.get<std::vector<std::string>>();
    } else {
      responses = j.at("responses").get<std::vector<std::string>>();
      if (j.contains("matchers")) matchers = j["matchers"].get<std::vector<std::string>>();
    }
  } catch (const json::exception& e) {
    throw ConfigError("bad script file: " + std::string(e.what()));
  }
  ProviderPtr p = scripted_provider(std::move(responses), std::move(matchers));
  if (spec.http.rate_limit) p = with_rate_limit(std::move(p), *spec.http.rate_limit);
  return p;
}

int cmd_play(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (!c.provider) throw ConfigError("play needs a provider in the config");
  if (c.out.empty()) throw ConfigError("play needs --out for the dialog corpus");
  const Corpus input = load_corpus(require_corpus(c));
  if (input.scenarios.empty()) throw ConfigError("corpus '" + c.corpus.string() + "' holds no scenarios");

  Corpus merged;
  if (fs::exists(c.out)) merged = load_corpus(c.out);

  BatchPlan plan;
  plan.run_id = c.run_id;
  plan.session = c.session;
  for (const auto& [id, _] : input.scenarios) plan.scenario_ids.push_back(id);
  std::map<std::string, BotPtr> bots;
  for (const auto& d : c.bots.empty() ? list_builtin_bots() : c.bots) {
    bots.emplace(d.bot_id, make_bot(d));
    plan.bot_ids.push_back(d.bot_id);
  }

  BatchOptions options;
  options.concurrency = c.concurrency;
  options.existing = merged.dialogs;
  options.on_session = [&](const Dialog& d) { append_records(c.out, {dialog_record(d)}); };

  ProviderPtr provider = make_provider(*c.provider);
  BatchResult result = run_batch(plan, input.scenarios, bots, *provider, options);

  for (auto& [id, s] : result.corpus.scenarios) merged.scenarios.insert_or_assign(id, s);
  for (auto& [id, d] : result.corpus.dialogs) merged.dialogs.insert_or_assign(id, d);
  if (!merged.scale && input.scale) merged.scale = input.scale;
  save_corpus(merged, c.out);

  const std::string manifest = batch_manifest(plan, result, provider->fingerprint());
  const fs::path manifest_path = c.manifest ? *c.manifest : fs::path(c.out.string() + ".manifest.json");
  write_file(manifest_path, manifest);

  out << "dialogs: " << result.corpus.dialogs.size() << " (" << result.failures.size() << " failed)\n";
  for (const auto& [bot, n] : result.per_bot_counts) out << "  " << bot << ": " << n << "\n";
  for (const auto& f : result.failures) {
    err << "session " << f.scenario_id << " x " << f.bot_id << " failed [" << f.kind << "]: " << f.message << "\n";
  }
  if (result.unbalanced) {
    err << "warning [UnbalancedRun]: per-bot dialog counts differ; see " << manifest_path.string() << "\n";
    return c.allow_unbalanced ? kExitOk : kExitWarnings;
  }
  return result.failures.empty() ? kExitOk : kExitWarnings;
}

int cmd_score(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (!c.provider) throw ConfigError("score needs a provider in the config");
  Corpus corpus = load_corpus(require_corpus(c));
  const fs::path dest = output_or_corpus(c);
  const Banks banks = resolve_banks(c);
  const ScoreScale scale = corpus_scale(corpus, c, banks);
  if (!corpus.scale) corpus.scale = scale;
  ProviderPtr provider = make_provider(*c.provider);

  ScoringOptions options;
  options.policy = c.retry_once ? ParsePolicy::RetryOnce : ParsePolicy::Strict;
  options.concurrency = c.concurrency;

  const auto designs = c.designs.empty() ? all_designs() : c.designs;
  bool any_failure = false;
  for (const auto& design : designs) {
    const PromptConfig config = make_prompt_config(design, scale, c.demo_bank, c.instruction_bank);
    const std::string fp = config.fingerprint();
    std::set<std::string> done;
    for (const auto& s : corpus.scores) {
      if (s.config_fingerprint == fp) done.insert(s.dialog_id);
    }
    std::vector<Dialog> todo;
    for (const auto& [id, d] : corpus.dialogs) {
      if (!done.count(id)) todo.push_back(d);
    }
    ScoreRun run = score_dialogs(todo, corpus, config, banks, *provider, options);
    corpus.scores.insert(corpus.scores.end(), run.scores.begin(), run.scores.end());
    out << design << ": scored " << run.scores.size() << ", kept " << done.size() << ", failed "
        << run.failures.size() << "  [" << fp << "]\n";
    for (const auto& f : run.failures) err << "  " << f.dialog_id << " [" << f.kind << "]: " << f.message << "\n";
    if (!run.failures.empty()) {
      any_failure = true;
      if (c.strict) {
        save_corpus(corpus, dest);
        err << "error: scoring aborted in strict mode; failed dialogs:";
        for (const auto& f : run.failures) err << " " << f.dialog_id;
        err << "\n";
        return kExitFatal;
      }
    }
  }
  save_corpus(corpus, dest);
  return any_failure ? kExitWarnings : kExitOk;
}

int cmd_rank(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Corpus corpus = load_corpus(require_corpus(c));
  const Banks banks = resolve_banks(c);
  AggregateResult agg;
  std::string title;
  std::string fp;
  if (c.human) {
    agg = aggregate_ground_truth(corpus, Verbalizer(corpus_scale(corpus, c, banks)), c.grouping);
    fp = "human";
    title = "human ratings (" + std::string(to_string(c.grouping)) + ")";
  } else {
    fp = select_fingerprint(corpus, c, banks);
    const auto scores = scores_for(corpus, fp);
    agg = aggregate(scores, corpus, c.grouping);
    title = fp + " (" + std::string(to_string(c.grouping)) + ")";
  }
  const auto ranked = rank(agg.ratings);
  const std::string report = ranking_report(ranked, title);
  out << report;
  if (!c.out.empty()) write_file(c.out, report);
  maybe_write(c.records, ranking_records(ranked, fp));

  for (const auto& w : agg.warnings) err << "warning: " << w << "\n";
  for (const auto& g : agg.empty_groups) err << "warning [EmptyGroup]: " << g << " has no scored dialogs\n";
  const bool warn = agg.unequal_n || !agg.empty_groups.empty();
  return warn && !c.allow_unbalanced ? kExitWarnings : kExitOk;
}

int cmd_correlate(const RunConfig& c, std::ostream& out, std::ostream&) {
  const Corpus corpus = load_corpus(require_corpus(c));
  const Banks banks = resolve_banks(c);
  const std::string fp = select_fingerprint(corpus, c, banks);
  const auto scores = scores_for(corpus, fp);
  const Verbalizer verbalizer(corpus_scale(corpus, c, banks));

  std::map<std::string, double> machine;
  std::map<std::string, double> human;
  if (c.level == CorrelationLevel::System) {
    machine = rating_map(aggregate(scores, corpus, c.grouping).ratings);
    human = rating_map(aggregate_ground_truth(corpus, verbalizer, c.grouping).ratings);
  } else {
    machine = score_map(scores);
    human = score_map(ground_truth_scores(corpus, verbalizer));
  }
  const auto result = correlate(machine, human, c.level, c.method);
  const std::string report = correlation_text(result.report, fp);
  out << report;
  if (!c.out.empty()) write_file(c.out, report);
  maybe_write(c.scatter, scatter_table(result.points));
  maybe_write(c.records, correlation_record(result.report, fp));
  return kExitOk;
}

int cmd_annotate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  Corpus corpus = load_corpus(require_corpus(c));
  std::unique_ptr<Annotator> annotator;
  if (c.annotator == "keyword") {
    annotator = std::make_unique<KeywordAnnotator>();
  } else {
    if (c.taxonomy.empty()) throw ConfigError("a command annotator needs a declared taxonomy");
    annotator = std::make_unique<SubprocessAnnotator>(c.annotator, c.taxonomy);
  }
  AnnotationRun run = annotate_corpus(corpus, *annotator, c.concurrency);
  corpus.turn_annotations = run.annotations;
  save_corpus(corpus, output_or_corpus(c));
  out << "annotated " << run.annotations.size() << " turns with " << annotator->fingerprint() << "\n";
  for (const auto& f : run.failures) {
    err << "  " << f.dialog_id << " turn " << f.turn_index << " [AnnotatorError]: " << f.message << "\n";
  }
  return run.failures.empty() ? kExitOk : kExitWarnings;
}

int cmd_flows(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Corpus corpus = load_corpus(require_corpus(c));
  if (c.out.empty()) throw ConfigError("flows needs --out for the Sankey file");
  const FlowResult flows = compute_flows(corpus.turn_annotations, corpus, c.role);
  export_sankey(flows.edges, c.out, c.min_weight);
  out << "dialogs: " << flows.dialogs << ", stages: " << (flows.length ? flows.length - 1 : 0)
      << ", edges: " << flows.edges.size() << "\n";
  for (const auto& w : flows.warnings) err << "warning: " << w << "\n";
  return flows.warnings.empty() ? kExitOk : kExitWarnings;
}

int cmd_validate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Corpus corpus = load_corpus(require_corpus(c));
  std::size_t problems = 0;
  for (const auto& [id, d] : corpus.dialogs) {
    for (const auto& v : validate_dialog(d)) {
      ++problems;
      err << id;
      if (v.turn_index) err << " turn " << *v.turn_index;
      err << " [" << to_string(v.rule) << "]: " << v.message << "\n";
    }
  }
  if (problems) return kExitFatal;
  validate_corpus(corpus);
  out << "ok: " << corpus.scenarios.size() << " scenarios, " << corpus.dialogs.size() << " dialogs, "
      << corpus.annotations.size() << " annotations, " << corpus.scores.size() << " scores, "
      << corpus.turn_annotations.size() << " turn annotations\n";
  return kExitOk;
}

int cmd_demo(const RunConfig& c, std::ostream& out, std::ostream&) {
  const fs::path dir = c.out.empty() ? fs::path("demo-out") : c.out;
  const DemoResult r = run_demo(dir);
  out << ranking_report(rank(r.ratings.at("fs+instr").ratings), "fs+instr (bot-polarity)");
  out << "\n" << correlation_text(r.correlations.at("fs+instr").report, "fs+instr vs human");
  out << "\nwrote " << r.files.size() << " files to " << dir.string() << "\n";
  return kExitOk;
}

int cmd_ingest(const std::string& format, const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.corpus.empty()) throw ConfigError("ingest needs the source file (--corpus)");
  if (c.out.empty()) throw ConfigError("ingest needs --out");
  IngestResult r;
  if (format == "ieval") {
    r = ingest_ieval(c.corpus);
  } else if (format == "fed") {
    r = ingest_fed(c.corpus);
  } else {
    throw ConfigError("unknown ingest format '" + format + "' (expected ieval or fed)");
  }
  validate_corpus(r.corpus);
  save_corpus(r.corpus, c.out);
  out << "ingested " << r.corpus.dialogs.size() << " dialogs, " << r.corpus.annotations.size()
      << " annotations\n";
  for (const auto& w : r.warnings) err << "warning: " << w << "\n";
  return r.warnings.empty() ? kExitOk : kExitWarnings;
}

int run_guarded(const std::function<int()>& command, std::ostream& err) {
  try {
    return command();
  } catch (const Error& e) {
    err << "error [" << e.kind() << "]: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitFatal;
}

}  // namespace dialeval::cli
