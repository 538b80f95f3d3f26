#ifndef BILEVEL_ERRORS_HPP
#define BILEVEL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bilevel {

// Base class for all library errors. `code` mirrors the CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

// A leader solution (or capacity split) that cannot be completed.
class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what) : Error(2, what) {}
};

// Malformed input: missing costs, broken invariants, unsupported values.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(3, what) {}
};

// An operation was called on a problem variant it does not handle.
class WrongVariantError : public Error {
 public:
  explicit WrongVariantError(const std::string& what) : Error(3, what) {}
};

// An oracle enumeration would exceed the configured budget.
class BudgetExceededError : public Error {
 public:
  explicit BudgetExceededError(const std::string& what) : Error(4, what) {}
};

}  // namespace bilevel

#endif  // BILEVEL_ERRORS_HPP
