#pragma once

#include <stdexcept>
#include <string>

namespace spamfilter {

// Broad failure classes; the CLI maps these onto exit codes.
enum class ErrorKind {
  input,   // unreadable or unusable data (corpus, result files)
  config,  // invalid parameters or incompatible configurations
  logic,   // precondition violated by the caller
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace spamfilter
