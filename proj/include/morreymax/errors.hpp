#pragma once

#include <stdexcept>
#include <string>

namespace morreymax {

/// Input that violates a documented precondition or type invariant.
class InvalidInput : public std::invalid_argument {
public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// A JSON or builtin function spec failed validation. `path()` points into
/// the offending document, e.g. "/pieces/3/beta".
class SpecError : public InvalidInput {
public:
  SpecError(std::string path, const std::string& message)
      : InvalidInput(path + ": " + message), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

private:
  std::string path_;
};

/// A piece with exponent beta >= n touches the origin, so the moment
/// integral diverges there.
class NonIntegrable : public InvalidInput {
public:
  explicit NonIntegrable(const std::string& what) : InvalidInput(what) {}
};

/// A refinement or root search failed to reach its tolerance.
class NonConvergence : public std::runtime_error {
public:
  explicit NonConvergence(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace morreymax
