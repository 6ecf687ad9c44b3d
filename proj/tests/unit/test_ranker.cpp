#include <doctest.h>

#include <algorithm>
#include <random>

#include "dialeval/errors.hpp"
#include "dialeval/ranker.hpp"

using namespace dialeval;

namespace {

// Two bots, each with two positive and two negative dialogs.
Corpus grid() {
  Corpus c;
  c.scale = ieval_scale();
  c.scenarios["p1"] = Scenario{"p1", "happy", Polarity::Positive, "x", "Yay"};
  c.scenarios["p2"] = Scenario{"p2", "proud", Polarity::Positive, "x", "Yay"};
  c.scenarios["n1"] = Scenario{"n1", "sad", Polarity::Negative, "x", "Boo"};
  c.scenarios["n2"] = Scenario{"n2", "angry", Polarity::Negative, "x", "Boo"};
  for (const char* bot : {"A", "B"}) {
    for (const char* sc : {"p1", "p2", "n1", "n2"}) {
      Dialog d;
      d.dialog_id = std::string(sc) + "__" + bot;
      d.scenario_id = sc;
      d.bot_id = bot;
      d.append(Role::Speaker, "hi");
      d.append(Role::Listener, "hello");
      c.dialogs[d.dialog_id] = d;
    }
  }
  return c;
}

std::vector<DialogScore> scores(const std::map<std::string, double>& v) {
  std::vector<DialogScore> out;
  for (const auto& [id, x] : v) out.push_back({id, "", x, "", "cfg"});
  return out;
}

}  // namespace

TEST_CASE("grouping keys") {
  Corpus c = grid();
  CHECK(system_key(c.dialogs.at("p1__A"), c, Grouping::Bot).label() == "A");
  CHECK(system_key(c.dialogs.at("n1__A"), c, Grouping::BotPolarity).label() == "A/negative");
  CHECK(parse_grouping("bot-polarity") == Grouping::BotPolarity);
  CHECK_THROWS_AS(parse_grouping("bots"), ConfigError);
}

TEST_CASE("system means are plain averages") {
  Corpus c = grid();
  auto s = scores({{"p1__A", 3}, {"p2__A", 2}, {"n1__A", 1}, {"n2__A", 1},
                   {"p1__B", 2}, {"p2__B", 2}, {"n1__B", 3}, {"n2__B", 3}});
  auto by_bot = aggregate(s, c, Grouping::Bot);
  REQUIRE(by_bot.ratings.size() == 2);
  CHECK(by_bot.ratings[0].mean == 7.0 / 4);
  CHECK(by_bot.ratings[1].mean == 10.0 / 4);
  CHECK(by_bot.ratings[1].n == 4);
  CHECK_FALSE(by_bot.unequal_n);

  auto by_pol = aggregate(s, c, Grouping::BotPolarity);
  REQUIRE(by_pol.ratings.size() == 4);
  CHECK(by_pol.ratings[0].key.label() == "A/positive");
  CHECK(by_pol.ratings[0].mean == 2.5);
  CHECK(by_pol.ratings[0].stddev == doctest::Approx(std::sqrt(0.5)));
  CHECK(by_pol.ratings[1].key.label() == "A/negative");
  CHECK(by_pol.ratings[1].stddev == 0.0);
}

TEST_CASE("missing and duplicate scores") {
  Corpus c = grid();
  auto partial = aggregate(scores({{"p1__A", 3}, {"p2__A", 2}, {"p1__B", 1}}), c, Grouping::BotPolarity);
  CHECK(partial.unequal_n);
  CHECK(partial.empty_groups.size() == 2);
  CHECK(std::find(partial.empty_groups.begin(), partial.empty_groups.end(), "B/negative") !=
        partial.empty_groups.end());
  CHECK_THROWS_AS(aggregate(scores({{"zz", 1}}), c, Grouping::Bot), LinkError);
  auto twice = scores({{"p1__A", 3}});
  twice.push_back(twice.front());
  CHECK_THROWS_AS(aggregate(twice, c, Grouping::Bot), SchemaError);
}

TEST_CASE("competition ranking with ties") {
  std::vector<SystemRating> r = {
      {{"C", Polarity::Unspecified}, 2.0, 4, 0},
      {{"A", Polarity::Unspecified}, 3.0, 4, 0},
      {{"B", Polarity::Unspecified}, 3.0, 4, 0},
      {{"D", Polarity::Unspecified}, 1.0, 4, 0},
  };
  auto ranked = rank(r);
  CHECK(ranked[0].rating.key.bot_id == "A");
  CHECK(ranked[1].rating.key.bot_id == "B");
  CHECK(ranked[0].rank == 1);
  CHECK(ranked[1].rank == 1);
  CHECK(ranked[0].tied);
  CHECK(ranked[2].rank == 3);
  CHECK_FALSE(ranked[2].tied);
  CHECK(ranked[3].rank == 4);
  CHECK_THROWS_AS(rank(std::vector<SystemRating>{}), EmptyGroup);

  std::string report = ranking_report(ranked, "t");
  CHECK(report.find("1=") != std::string::npos);
  CHECK(ranking_records(ranked, "cfg").find("\"kind\":\"rating\"") != std::string::npos);
}

TEST_CASE("rounding noise does not split a tie") {
  std::vector<SystemRating> r = {
      {{"A", Polarity::Unspecified}, 0.1 + 0.2, 2, 0},
      {{"B", Polarity::Unspecified}, 0.3, 2, 0},
  };
  auto ranked = rank(r);
  CHECK(ranked[0].rank == 1);
  CHECK(ranked[1].rank == 1);
  CHECK(ranked[0].rating.key.bot_id == "A");
}

TEST_CASE("ground truth runs through the same path") {
  Corpus c = grid();
  for (const auto& [id, d] : c.dialogs) {
    c.annotations[id] = GroundTruthAnnotation{id, d.bot_id == "A" ? "Good" : "Bad", {}};
  }
  auto agg = aggregate_ground_truth(c, Verbalizer(ieval_scale()), Grouping::Bot);
  CHECK(agg.ratings[0].mean == 3.0);
  CHECK(agg.ratings[1].mean == 1.0);
  CHECK(ground_truth_scores(c, Verbalizer(ieval_scale())).size() == 8);
}

TEST_CASE("permuting the input never changes a rating") {
  Corpus c = grid();
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> label(1, 3);
  for (int trial = 0; trial < 50; ++trial) {
    std::map<std::string, double> v;
    for (const auto& [id, _] : c.dialogs) v[id] = label(rng);
    auto s = scores(v);
    auto base = aggregate(s, c, Grouping::BotPolarity).ratings;
    std::shuffle(s.begin(), s.end(), rng);
    CHECK(aggregate(s, c, Grouping::BotPolarity).ratings == base);
  }
}
