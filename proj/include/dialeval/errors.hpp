#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dialeval {

// Root of every error the library throws. `kind()` is a stable short name
// used in manifests and CLI diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define DIALEVAL_DEFINE_ERROR(Name)                                    \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& message) : Error(#Name, message) {} \
  }

// corpus
class SchemaError : public Error {
 public:
  SchemaError(const std::string& message, std::size_t line = 0)
      : Error("SchemaError",
              line ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};
DIALEVAL_DEFINE_ERROR(LinkError);
DIALEVAL_DEFINE_ERROR(IoError);

// promptkit
DIALEVAL_DEFINE_ERROR(TemplateError);
DIALEVAL_DEFINE_ERROR(BankError);

// providers
class TransportError : public Error {
 public:
  TransportError(const std::string& message, int attempts)
      : Error("TransportError", message), attempts_(attempts) {}
  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};
DIALEVAL_DEFINE_ERROR(AuthError);
DIALEVAL_DEFINE_ERROR(ProtocolError);

class ScriptExhausted : public Error {
 public:
  explicit ScriptExhausted(std::size_t call_index)
      : Error("ScriptExhausted", "scripted provider exhausted at call #" +
                                     std::to_string(call_index)),
        call_index_(call_index) {}
  std::size_t call_index() const noexcept { return call_index_; }

 private:
  std::size_t call_index_;
};

class PromptMismatch : public Error {
 public:
  PromptMismatch(std::size_t call_index, std::string expected, std::string prompt)
      : Error("PromptMismatch",
              "call #" + std::to_string(call_index) + ": prompt does not contain \"" +
                  expected + "\"; prompt was:\n" + prompt),
        expected_(std::move(expected)),
        prompt_(std::move(prompt)) {}
  const std::string& expected() const noexcept { return expected_; }
  const std::string& prompt() const noexcept { return prompt_; }

 private:
  std::string expected_;
  std::string prompt_;
};

// botbridge
DIALEVAL_DEFINE_ERROR(BotUnavailable);
DIALEVAL_DEFINE_ERROR(EmptyResponse);

// playengine
DIALEVAL_DEFINE_ERROR(DegenerateTurn);
DIALEVAL_DEFINE_ERROR(UnbalancedRun);

// scorer
DIALEVAL_DEFINE_ERROR(UnparsableCompletion);
DIALEVAL_DEFINE_ERROR(AmbiguousCompletion);
DIALEVAL_DEFINE_ERROR(UnknownLabel);

// ranker
DIALEVAL_DEFINE_ERROR(EmptyGroup);

// stats
DIALEVAL_DEFINE_ERROR(DegenerateSeries);

class KeyMismatch : public Error {
 public:
  KeyMismatch(std::vector<std::string> only_machine, std::vector<std::string> only_human);
  const std::vector<std::string>& only_machine() const noexcept { return only_machine_; }
  const std::vector<std::string>& only_human() const noexcept { return only_human_; }

 private:
  std::vector<std::string> only_machine_;
  std::vector<std::string> only_human_;
};

// discourse
DIALEVAL_DEFINE_ERROR(AnnotatorError);
DIALEVAL_DEFINE_ERROR(IncompleteAnnotations);

// cli
DIALEVAL_DEFINE_ERROR(ConfigError);

#undef DIALEVAL_DEFINE_ERROR

}  // namespace dialeval
