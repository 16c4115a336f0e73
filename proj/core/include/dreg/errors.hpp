#pragma once

#include <stdexcept>
#include <string>

namespace dreg {

enum class ErrorKind {
  InvalidArgument,
  InvalidConfiguration,
  DegenerateColumn,
  DegenerateDesign,
  DegenerateIdentification,
  NumericalFailure,
  Io,
};

/// Base of every error raised by the library. The kind drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::InvalidConfiguration: return "invalid-configuration";
    case ErrorKind::DegenerateColumn: return "degenerate-column";
    case ErrorKind::DegenerateDesign: return "degenerate-design";
    case ErrorKind::DegenerateIdentification: return "degenerate-identification";
    case ErrorKind::NumericalFailure: return "numerical-failure";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace dreg
