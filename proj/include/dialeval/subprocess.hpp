#pragma once

#include <chrono>
#include <string>
#include <sys/types.h>

namespace dialeval {

// A child process spoken to one line at a time over its stdin/stdout.
// The command runs under /bin/sh -c. Not thread-safe; callers serialize.
class LineProcess {
 public:
  explicit LineProcess(const std::string& command,
                       std::chrono::milliseconds timeout = std::chrono::seconds(30));
  ~LineProcess();
  LineProcess(const LineProcess&) = delete;
  LineProcess& operator=(const LineProcess&) = delete;

  // Writes `line` plus a newline and returns the next output line without
  // its terminator. Throws IoError on a dead child, EOF or timeout.
  std::string exchange(const std::string& line);

  const std::string& command() const noexcept { return command_; }

 private:
  void close_child();

  std::string command_;
  std::chrono::milliseconds timeout_;
  int fd_ = -1;
  pid_t pid_ = -1;
  std::string buffer_;
};

}  // namespace dialeval
