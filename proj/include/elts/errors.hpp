#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace elts {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message) : std::runtime_error(message) {}
};

// Operation applied to a value of the wrong algebra kind.
class KindMismatchError : public Error {
 public:
  explicit KindMismatchError(const std::string& message) : Error(message) {}
};

// Composition over non-disjoint system collections (no-cloning guard).
class GradeClashError : public Error {
 public:
  explicit GradeClashError(const std::string& message) : Error(message) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& message) : Error(message) {}
};

struct Violation {
  std::string where;
  std::string what;
};

class ValidationError : public Error {
 public:
  ValidationError(const std::string& message, std::vector<Violation> violations)
      : Error(message), violations_(std::move(violations)) {}
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

}  // namespace elts
