#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dialeval/cli.hpp"
#include "dialeval/errors.hpp"

namespace {

using namespace dialeval;

struct Flags {
  std::string config;
  std::string corpus;
  std::string out;
  std::string manifest;
  std::string scatter;
  std::string records;
  std::vector<std::string> designs;
  std::string grouping;
  std::string level;
  std::string method;
  std::string role;
  std::string annotator;
  std::optional<int> concurrency;
  std::optional<std::size_t> min_weight;
  std::optional<bool> strict;
  bool retry_once = false;
  bool allow_unbalanced = false;
  bool human = false;
  std::string format;
};

cli::RunConfig resolve(const Flags& f) {
  cli::RunConfig c = f.config.empty() ? cli::RunConfig{} : cli::load_run_config(f.config);
  if (!f.corpus.empty()) c.corpus = f.corpus;
  if (!f.out.empty()) c.out = f.out;
  if (!f.manifest.empty()) c.manifest = f.manifest;
  if (!f.scatter.empty()) c.scatter = f.scatter;
  if (!f.records.empty()) c.records = f.records;
  if (!f.designs.empty()) c.designs = f.designs;
  if (!f.grouping.empty()) c.grouping = parse_grouping(f.grouping);
  if (!f.level.empty()) c.level = parse_level(f.level);
  if (!f.method.empty()) c.method = parse_method(f.method);
  if (!f.role.empty()) c.role = f.role == "all" ? std::nullopt : std::optional<Role>(parse_role(f.role));
  if (!f.annotator.empty()) c.annotator = f.annotator;
  if (f.concurrency) {
    if (*f.concurrency < 1) throw ConfigError("--concurrency must be >= 1");
    c.concurrency = *f.concurrency;
  }
  if (f.min_weight) c.min_weight = *f.min_weight;
  if (f.strict) c.strict = *f.strict;
  if (f.retry_once) c.retry_once = true;
  if (f.allow_unbalanced) c.allow_unbalanced = true;
  if (f.human) c.human = true;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dialeval: prompted dialog evaluation pipeline"};
  app.require_subcommand(1);
  Flags f;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config, "JSON run config")->check(CLI::ExistingFile);
    sub->add_option("--corpus", f.corpus, "input corpus (JSON lines)");
    sub->add_option("--out", f.out, "output path");
    sub->add_option("--concurrency", f.concurrency, "worker threads");
  };
  auto prompt_flag = [&](CLI::App* sub) {
    sub->add_option("--prompt-config", f.designs, "zs, zs+instr, fs or fs+instr (repeatable)")
        ->check(CLI::IsMember({"zs", "zs+instr", "fs", "fs+instr"}));
  };
  auto grouping_flag = [&](CLI::App* sub) {
    sub->add_option("--grouping", f.grouping, "bot or bot-polarity")->check(CLI::IsMember({"bot", "bot-polarity"}));
  };

  auto* play = app.add_subcommand("play", "run chatbot sessions against the prompted speaker");
  common(play);
  play->add_option("--manifest", f.manifest, "run manifest path (default: <out>.manifest.json)");
  play->add_flag("--allow-unbalanced", f.allow_unbalanced, "exit 0 even if per-bot counts differ");

  auto* score = app.add_subcommand("score", "score dialogs with the prompted judge");
  common(score);
  prompt_flag(score);
  score->add_flag("--strict,!--no-strict", f.strict, "abort on the first failed dialog (default)");
  score->add_flag("--retry-once", f.retry_once, "retry unparsable completions once at temperature 0");

  auto* rank = app.add_subcommand("rank", "aggregate scores per system and rank them");
  common(rank);
  prompt_flag(rank);
  grouping_flag(rank);
  rank->add_option("--records", f.records, "write rating records here");
  rank->add_flag("--human", f.human, "rank ground-truth annotations instead of scores");
  rank->add_flag("--allow-unbalanced", f.allow_unbalanced, "exit 0 even if group sizes differ");

  auto* corr = app.add_subcommand("correlate", "correlate machine scores with human ratings");
  common(corr);
  prompt_flag(corr);
  grouping_flag(corr);
  corr->add_option("--level", f.level, "system or dialog")->check(CLI::IsMember({"system", "dialog"}));
  corr->add_option("--method", f.method, "pearson or spearman (default by level)")
      ->check(CLI::IsMember({"pearson", "spearman"}));
  corr->add_option("--scatter", f.scatter, "write the id/machine/human table here");
  corr->add_option("--records", f.records, "write the correlation record here");

  auto* annotate = app.add_subcommand("annotate", "label every turn with an emotion/intent tag");
  common(annotate);
  annotate->add_option("--annotator", f.annotator, "'keyword' or a shell command");

  auto* flows = app.add_subcommand("flows", "compute discourse flows and export a Sankey file");
  common(flows);
  flows->add_option("--role", f.role, "speaker, listener or all")->check(CLI::IsMember({"speaker", "listener", "all"}));
  flows->add_option("--min-weight", f.min_weight, "drop links lighter than this");

  auto* validate = app.add_subcommand("validate", "check a corpus file");
  common(validate);

  auto* demo = app.add_subcommand("demo", "offline end-to-end run with built-in bots");
  common(demo);

  auto* ingest = app.add_subcommand("ingest", "convert an external dataset into a corpus");
  common(ingest);
  ingest->add_option("--format", f.format, "ieval or fed")->required()->check(CLI::IsMember({"ieval", "fed"}));

  CLI11_PARSE(app, argc, argv);

  auto* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  return cli::run_guarded(
      [&] {
        const cli::RunConfig c = resolve(f);
        if (name == "play") return cli::cmd_play(c, std::cout, std::cerr);
        if (name == "score") return cli::cmd_score(c, std::cout, std::cerr);
        if (name == "rank") return cli::cmd_rank(c, std::cout, std::cerr);
        if (name == "correlate") return cli::cmd_correlate(c, std::cout, std::cerr);
        if (name == "annotate") return cli::cmd_annotate(c, std::cout, std::cerr);
        if (name == "flows") return cli::cmd_flows(c, std::cout, std::cerr);
        if (name == "validate") return cli::cmd_validate(c, std::cout, std::cerr);
        if (name == "demo") return cli::cmd_demo(c, std::cout, std::cerr);
        return cli::cmd_ingest(f.format, c, std::cout, std::cerr);
      },
      std::cerr);
}
