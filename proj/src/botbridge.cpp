#include "dialeval/botbridge.hpp"

#include <algorithm>
#include <mutex>

#include <httplib.h>
#include <json.hpp>

#include "dialeval/errors.hpp"
#include "dialeval/subprocess.hpp"
#include "dialeval/text.hpp"

namespace dialeval {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string_view to_string(BotKind k) {
  switch (k) {
    case BotKind::InProcess: return "in-process";
    case BotKind::Subprocess: return "subprocess";
    case BotKind::Http: return "http";
  }
  return "in-process";
}

BotKind parse_bot_kind(std::string_view s) {
  if (s == "in-process") return BotKind::InProcess;
  if (s == "subprocess") return BotKind::Subprocess;
  if (s == "http") return BotKind::Http;
  throw ConfigError("unknown bot kind '" + std::string(s) + "'");
}

void validate_request(const BotTurnRequest& request) {
  if (request.history.empty()) throw SchemaError("bot request has an empty history");
  for (std::size_t i = 0; i < request.history.size(); ++i) {
    Role expected = i % 2 == 0 ? Role::Speaker : Role::Listener;
    if (request.history[i].role != expected) {
      throw SchemaError("bot request history breaks alternation at turn " + std::to_string(i));
    }
  }
  if (request.history.back().role != Role::Speaker) {
    throw SchemaError("bot request history must end with a Speaker turn");
  }
}

std::string Bot::respond(const BotTurnRequest& request) {
  validate_request(request);
  std::string out = text::normalize(reply(request));
  if (out.empty()) {
    throw EmptyResponse("bot '" + id() + "' returned an empty reply at turn " +
                        std::to_string(request.history.size()));
  }
  return out;
}

std::string bot_request_json(const BotTurnRequest& request) {
  ojson o;
  o["scenario_id"] = request.scenario_id;
  ojson turns = ojson::array();
  for (const auto& t : request.history) turns.push_back({{"role", to_string(t.role)}, {"text", t.text}});
  o["turns"] = std::move(turns);
  return o.dump();
}

BotTurnRequest parse_bot_request_json(const std::string& body) {
  BotTurnRequest r;
  try {
    json j = json::parse(body);
    r.scenario_id = j.value("scenario_id", std::string());
    for (const auto& t : j.at("turns")) {
      r.history.push_back(Turn{r.history.size(), parse_role(t.at("role").get<std::string>()),
                               text::normalize(t.at("text").get<std::string>())});
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed bot request: ") + e.what());
  }
  return r;
}

namespace {

std::size_t speaker_turns(const BotTurnRequest& r) {
  return static_cast<std::size_t>(std::count_if(r.history.begin(), r.history.end(),
                                                 [](const Turn& t) { return t.role == Role::Speaker; }));
}

class EchoBot : public Bot {
 public:
  using Bot::Bot;

 protected:
  std::string reply(const BotTurnRequest& r) override { return "You said: " + r.history.back().text; }
};

class TemplateListenerBot : public Bot {
 public:
  using Bot::Bot;

 protected:
  std::string reply(const BotTurnRequest& r) override {
    const auto& cycle = template_listener_cycle();
    return cycle[(speaker_turns(r) - 1) % cycle.size()];
  }
};

class BadBot : public Bot {
 public:
  using Bot::Bot;

 protected:
  std::string reply(const BotTurnRequest&) override { return bad_bot_sentence(); }
};

// Reads the emotional polarity off the speaker's words, then amplifies
// positive news with follow-up questions or sympathizes with bad news.
class GoodBot : public Bot {
 public:
  using Bot::Bot;

 protected:
  std::string reply(const BotTurnRequest& r) override {
    static const std::vector<std::string> positive = {
        "That's wonderful news, congratulations! How did it feel when it happened?",
        "You must be so happy, and you deserve it. What are you most looking forward to now?",
        "I'm really glad you shared this with me. Who are you going to celebrate with?",
    };
    static const std::vector<std::string> negative = {
        "I'm so sorry you're going through this, that sounds really hard. What happened next?",
        "That must be painful, and it's okay to feel that way. Is there someone who can support "
        "you right now?",
        "I'm sorry, I hope things get better soon. Maybe talking it through with a friend could "
        "help?",
    };
    const auto& lines = is_negative(r) ? negative : positive;
    return lines[(speaker_turns(r) - 1) % lines.size()];
  }

 private:
  static int tone(const std::string& utterance) {
    static const std::vector<std::string> neg = {
        "sad", "upset", "angry", "afraid", "scared", "terrified", "devastated", "lost",
        "lonely", "worried", "anxious", "hurt", "awful", "terrible", "fail", "failed",
        "broke", "died", "passed away", "disappointed", "embarrassed", "ashamed", "guilty",
        "furious", "annoyed", "sick", "fired", "crash", "stolen", "jealous", "miss"};
    static const std::vector<std::string> pos = {
        "happy", "proud", "excited", "glad", "great", "wonderful", "won", "passed", "promotion",
        "promoted", "love", "grateful", "thankful", "amazing", "awesome", "joy", "hopeful",
        "content", "confident", "celebrat", "finally got", "new job", "vacation"};
    std::string t = text::casefold(utterance);
    int score = 0;
    for (const auto& w : neg) score -= static_cast<int>(text::count_occurrences(t, w));
    for (const auto& w : pos) score += static_cast<int>(text::count_occurrences(t, w));
    return score;
  }

  static bool is_negative(const BotTurnRequest& r) {
    int opener = tone(r.history.front().text);
    if (opener != 0) return opener < 0;
    int all = 0;
    for (const auto& t : r.history) {
      if (t.role == Role::Speaker) all += tone(t.text);
    }
    return all < 0;
  }
};

class SerializedBot : public Bot {
 public:
  using Bot::Bot;

 protected:
  std::string reply(const BotTurnRequest& r) final {
    if (descriptor().reentrant) return exchange(r);
    std::lock_guard lock(mu_);
    return exchange(r);
  }
  virtual std::string exchange(const BotTurnRequest& r) = 0;

  static std::string reply_field(const std::string& body, const std::string& who) {
    try {
      json j = json::parse(body);
      auto it = j.find("reply");
      if (it == j.end() || !it->is_string()) throw BotUnavailable("bot '" + who + "' sent no reply field");
      return it->get<std::string>();
    } catch (const json::exception& e) {
      throw BotUnavailable("bot '" + who + "' sent malformed JSON: " + e.what());
    }
  }

 private:
  std::mutex mu_;
};

class SubprocessBot : public SerializedBot {
 public:
  explicit SubprocessBot(BotDescriptor d) : SerializedBot(std::move(d)) {}

 protected:
  std::string exchange(const BotTurnRequest& r) override {
    try {
      if (!process_) process_ = std::make_unique<LineProcess>(descriptor().target);
      json req = json::parse(bot_request_json(r));
      req["kind"] = "bot_request";
      return reply_field(process_->exchange(req.dump()), id());
    } catch (const IoError& e) {
      process_.reset();
      throw BotUnavailable("bot '" + id() + "': " + e.what());
    }
  }

 private:
  std::unique_ptr<LineProcess> process_;
};

class HttpBot : public SerializedBot {
 public:
  explicit HttpBot(BotDescriptor d) : SerializedBot(std::move(d)) {
    const auto& url = descriptor().target;
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("bot endpoint '" + url + "' lacks a scheme");
    auto path_start = url.find('/', scheme_end + 3);
    origin_ = url.substr(0, path_start);
    base_path_ = path_start == std::string::npos ? "" : url.substr(path_start);
    while (!base_path_.empty() && base_path_.back() == '/') base_path_.pop_back();
  }

 protected:
  std::string exchange(const BotTurnRequest& r) override {
    httplib::Client client(origin_);
    client.set_read_timeout(60, 0);
    auto res = client.Post(base_path_ + "/respond", bot_request_json(r), "application/json");
    if (!res) throw BotUnavailable("bot '" + id() + "': " + httplib::to_string(res.error()));
    if (res->status != 200) {
      throw BotUnavailable("bot '" + id() + "' answered HTTP " + std::to_string(res->status));
    }
    return reply_field(res->body, id());
  }

 private:
  std::string origin_;
  std::string base_path_;
};

}  // namespace

const std::vector<std::string>& template_listener_cycle() {
  static const std::vector<std::string> cycle = {
      "That sounds important. Can you tell me more?",
      "I'm sorry to hear that, I understand.",
      "I see, thank you for sharing.",
  };
  return cycle;
}

const std::string& bad_bot_sentence() {
  static const std::string s = "My favourite colour is blue and I like trains.";
  return s;
}

std::vector<BotDescriptor> list_builtin_bots() {
  return {
      {"EchoBot", BotKind::InProcess, "echo", {{"quality", "low"}}, true},
      {"TemplateListenerBot", BotKind::InProcess, "template", {{"quality", "medium"}}, true},
      {"BadBot", BotKind::InProcess, "bad", {{"quality", "lowest"}}, true},
      {"GoodBot", BotKind::InProcess, "good", {{"quality", "high"}}, true},
  };
}

BotPtr make_bot(const BotDescriptor& d) {
  if (d.bot_id.empty()) throw ConfigError("bot descriptor without an id");
  switch (d.kind) {
    case BotKind::InProcess:
      if (d.target == "echo") return std::make_shared<EchoBot>(d);
      if (d.target == "template") return std::make_shared<TemplateListenerBot>(d);
      if (d.target == "bad") return std::make_shared<BadBot>(d);
      if (d.target == "good") return std::make_shared<GoodBot>(d);
      throw ConfigError("unknown built-in bot '" + d.target + "'");
    case BotKind::Subprocess:
      if (d.target.empty()) throw ConfigError("subprocess bot '" + d.bot_id + "' has no command");
      return std::make_shared<SubprocessBot>(d);
    case BotKind::Http:
      return std::make_shared<HttpBot>(d);
  }
  throw ConfigError("unsupported bot kind");
}

}  // namespace dialeval
