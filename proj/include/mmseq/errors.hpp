#pragma once

#include <stdexcept>
#include <string>

namespace mmseq
{
/// Bad arguments, malformed files, unsupported format versions.
class InputError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Binary/JSON payload could not be decoded.
class FormatError : public InputError
{
public:
  using InputError::InputError;
};

/// The problem has no solution under the given geometry (ball fit, height
/// matching, unreachable targets).
class InfeasibleError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// A value broke a type invariant (non-orthonormal rotation, bad cluster).
class InvariantError : public std::logic_error
{
public:
  using std::logic_error::logic_error;
};

enum class ErrorKind { Input, Infeasible, Invariant };

/// Error raised by the pipeline; carries the stage that failed and the
/// category of the underlying failure.
class StageError : public std::runtime_error
{
public:
  StageError(std::string stage, ErrorKind kind, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)),
        kind_(kind)
  {
  }

  const std::string& stage() const { return stage_; }
  ErrorKind kind() const { return kind_; }

private:
  std::string stage_;
  ErrorKind kind_;
};
}  // namespace mmseq
