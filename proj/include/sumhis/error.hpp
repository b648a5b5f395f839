#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sumhis {

enum class ErrorKind {
  InvalidArgument,  // precondition or config invariant violated
  Format,           // malformed file or record
  Io,               // file could not be read or written
  Data,             // well-formed input that cannot be processed (ids, empty corpus)
  Numeric,          // non-finite values during training
};

inline std::string_view error_category(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::Format: return "format";
    case ErrorKind::Io: return "io";
    case ErrorKind::Data: return "data";
    case ErrorKind::Numeric: return "numeric";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view category() const noexcept { return error_category(kind_); }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorKind::InvalidArgument, what);
}

}  // namespace sumhis
