#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sstdelay {

// Mismatched varsets, partial morphisms, arity clashes.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument outside the operation's domain (empty word for a primitive
// root, substitution not in S, ...).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A measure applied to a pair it is not defined for.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ResourceError : public std::runtime_error {
 public:
  ResourceError(std::string stage, std::size_t budget)
      : std::runtime_error("state budget of " + std::to_string(budget) +
                           " exceeded in " + stage),
        stage_(std::move(stage)),
        budget_(budget) {}

  static ResourceError time_limit(const std::string& stage, double seconds) {
    return ResourceError("time limit of " + std::to_string(seconds) + " s exceeded in " + stage,
                         stage, 0);
  }
  // Same stage and budget, with context appended to the message.
  static ResourceError with_context(const ResourceError& e, const std::string& context) {
    return ResourceError(std::string(e.what()) + " (" + context + ")", e.stage(), e.budget());
  }

  const std::string& stage() const { return stage_; }
  std::size_t budget() const { return budget_; }

 private:
  ResourceError(const std::string& msg, std::string stage, std::size_t budget)
      : std::runtime_error(msg), stage_(std::move(stage)), budget_(budget) {}

  std::string stage_;
  std::size_t budget_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace sstdelay
