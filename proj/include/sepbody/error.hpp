#pragma once

#include <stdexcept>
#include <string>

namespace sepbody {

enum class ErrorKind {
  InvalidBody,
  InvalidArgument,
  EmptyCell,
  UnboundedDirection,
  GreatSubsphere,
  OrderTooSmall,
  AsymmetricBody,
  ZeroTilt,
  BracketFailure,
  SolverFailure,
  PointInBody,
  WindowExhausted,
  AcceptanceBudget,
  ReplicationFailure,
  DegenerateCell,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (the CLI in
/// particular) can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace sepbody
