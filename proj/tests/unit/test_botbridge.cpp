#include <doctest.h>

#include <json.hpp>

#include "dialeval/botbridge.hpp"
#include "dialeval/errors.hpp"
#include "helpers/mock_server.hpp"

using namespace dialeval;

namespace {

BotTurnRequest request(std::initializer_list<const char*> texts) {
  BotTurnRequest r;
  r.scenario_id = "s1";
  Role role = Role::Speaker;
  for (const char* t : texts) {
    r.history.push_back({r.history.size(), role, t});
    role = role == Role::Speaker ? Role::Listener : Role::Speaker;
  }
  return r;
}

BotPtr builtin(const std::string& id) {
  for (const auto& d : list_builtin_bots()) {
    if (d.bot_id == id) return make_bot(d);
  }
  FAIL("no such bot " << id);
  return nullptr;
}

}  // namespace

TEST_CASE("built-in roster") {
  auto bots = list_builtin_bots();
  REQUIRE(bots.size() == 4);
  CHECK(bots[0].bot_id == "EchoBot");
  CHECK(bots[3].bot_id == "GoodBot");
  for (const auto& d : bots) CHECK(d.kind == BotKind::InProcess);
}

TEST_CASE("EchoBot echoes the last turn") {
  auto bot = builtin("EchoBot");
  CHECK(bot->respond(request({"Hello  there"})) == "You said: Hello there");
  CHECK(bot->respond(request({"a", "b", "c"})) == "You said: c");
}

TEST_CASE("TemplateListenerBot cycles its three lines") {
  auto bot = builtin("TemplateListenerBot");
  const auto& cycle = template_listener_cycle();
  CHECK(bot->respond(request({"a"})) == cycle[0]);
  CHECK(bot->respond(request({"a", "b", "c"})) == cycle[1]);
  CHECK(bot->respond(request({"a", "b", "c", "d", "e"})) == cycle[2]);
  CHECK(bot->respond(request({"a", "b", "c", "d", "e", "f", "g"})) == cycle[0]);
}

TEST_CASE("BadBot ignores the speaker") {
  auto bot = builtin("BadBot");
  CHECK(bot->respond(request({"My cat died."})) == bad_bot_sentence());
}

TEST_CASE("GoodBot follows the emotional polarity") {
  auto bot = builtin("GoodBot");
  std::string happy = bot->respond(request({"I got a promotion and I'm so happy!"}));
  std::string sad = bot->respond(request({"My dog died and I am so sad."}));
  CHECK(happy != sad);
  CHECK(happy.find('?') != std::string::npos);
  CHECK(sad.find("sorry") != std::string::npos);
}

TEST_CASE("requests must alternate and end on the speaker") {
  auto bot = builtin("EchoBot");
  CHECK_THROWS_AS(bot->respond(request({"a", "b"})), SchemaError);
  BotTurnRequest empty;
  CHECK_THROWS_AS(bot->respond(empty), SchemaError);
  BotTurnRequest swapped;
  swapped.history = {{0, Role::Listener, "x"}};
  CHECK_THROWS_AS(bot->respond(swapped), SchemaError);
}

TEST_CASE("wire helpers round trip") {
  auto r = request({"one", "two", "three"});
  auto back = parse_bot_request_json(bot_request_json(r));
  CHECK(back.scenario_id == "s1");
  CHECK(back.history == r.history);
  CHECK_THROWS_AS(parse_bot_request_json("{"), SchemaError);
}

TEST_CASE("subprocess bots speak JSON lines") {
  auto bot = make_bot({"Ext", BotKind::Subprocess, std::string(FAKE_PROCESS) + " bot", {}, false});
  CHECK(bot->respond(request({"a"})) == "ack 1");
  CHECK(bot->respond(request({"a", "b", "c"})) == "ack 3");
}

TEST_CASE("broken subprocess bots are unavailable") {
  auto dead = make_bot({"Dead", BotKind::Subprocess, std::string(FAKE_PROCESS) + " die", {}, false});
  CHECK_THROWS_AS(dead->respond(request({"a"})), BotUnavailable);
  auto garbage = make_bot({"Junk", BotKind::Subprocess, std::string(FAKE_PROCESS) + " garbage", {}, false});
  CHECK_THROWS_AS(garbage->respond(request({"a"})), BotUnavailable);
  CHECK_THROWS_AS(make_bot({"X", BotKind::Subprocess, "", {}, false}), ConfigError);
}

TEST_CASE("http bots POST to /respond") {
  MockServer mock;
  mock.server().Post("/bot/respond", [](const httplib::Request& req, httplib::Response& res) {
    auto j = nlohmann::json::parse(req.body);
    std::string last = j["turns"].back()["text"];
    res.set_content(nlohmann::json{{"reply", "heard: " + last}}.dump(), "application/json");
  });
  mock.server().Post("/empty/respond", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"reply":"   "})", "application/json");
  });
  mock.start();
  auto bot = make_bot({"Web", BotKind::Http, mock.url() + "/bot/", {}, false});
  CHECK(bot->respond(request({"hello"})) == "heard: hello");
  auto missing = make_bot({"Web404", BotKind::Http, mock.url() + "/nope", {}, false});
  CHECK_THROWS_AS(missing->respond(request({"hello"})), BotUnavailable);
  auto empty = make_bot({"Blank", BotKind::Http, mock.url() + "/empty", {}, false});
  CHECK_THROWS_AS(empty->respond(request({"hello"})), EmptyResponse);
  auto down = make_bot({"Down", BotKind::Http, "http://127.0.0.1:1", {}, false});
  CHECK_THROWS_AS(down->respond(request({"hello"})), BotUnavailable);
}

TEST_CASE("make_bot rejects unknown names") {
  CHECK_THROWS_AS(make_bot({"X", BotKind::InProcess, "nope", {}, true}), ConfigError);
  CHECK_THROWS_AS(make_bot({"", BotKind::InProcess, "echo", {}, true}), ConfigError);
  CHECK_THROWS_AS(parse_bot_kind("grpc"), ConfigError);
}
