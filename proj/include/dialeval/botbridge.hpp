#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dialeval/corpus.hpp"

namespace dialeval {

enum class BotKind { InProcess, Subprocess, Http };

std::string_view to_string(BotKind k);
BotKind parse_bot_kind(std::string_view s);

struct BotDescriptor {
  std::string bot_id;
  BotKind kind = BotKind::InProcess;
  // Built-in name for in-process bots, a shell command for subprocess bots,
  // or a base URL for HTTP bots.
  std::string target;
  std::map<std::string, std::string> metadata;
  // Out-of-process backends are called one request at a time unless set.
  bool reentrant = false;
};

struct BotTurnRequest {
  std::vector<Turn> history;  // alternating, Speaker first, ends with Speaker
  std::string scenario_id;
};

// Throws SchemaError unless the history alternates from a Speaker turn and
// ends on one.
void validate_request(const BotTurnRequest& request);

class Bot {
 public:
  explicit Bot(BotDescriptor descriptor) : descriptor_(std::move(descriptor)) {}
  virtual ~Bot() = default;

  const BotDescriptor& descriptor() const noexcept { return descriptor_; }
  const std::string& id() const noexcept { return descriptor_.bot_id; }

  // Validates the request and the reply. Throws BotUnavailable when the
  // backend cannot be reached and EmptyResponse on a blank reply.
  std::string respond(const BotTurnRequest& request);

 protected:
  virtual std::string reply(const BotTurnRequest& request) = 0;

 private:
  BotDescriptor descriptor_;
};

using BotPtr = std::shared_ptr<Bot>;

// EchoBot, TemplateListenerBot, BadBot and GoodBot.
std::vector<BotDescriptor> list_builtin_bots();

// Instantiates any descriptor kind.
BotPtr make_bot(const BotDescriptor& descriptor);

// The fixed TemplateListenerBot cycle and BadBot sentence.
const std::vector<std::string>& template_listener_cycle();
const std::string& bad_bot_sentence();

// Wire helpers for out-of-process bots: {"scenario_id", "turns":[...]}.
std::string bot_request_json(const BotTurnRequest& request);
BotTurnRequest parse_bot_request_json(const std::string& body);

}  // namespace dialeval
