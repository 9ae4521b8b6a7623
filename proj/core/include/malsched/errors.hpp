#pragma once

#include <stdexcept>
#include <string>

namespace malsched {

/// Bad input: malformed files, schema violations, failed load-time checks.
/// Maps to process exit code 3.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// A certified internal guarantee failed. This is always a bug in the solver,
/// never a property of the input. Maps to process exit code 4.
class InvariantViolation : public std::logic_error {
public:
  explicit InvariantViolation(const std::string& what) : std::logic_error(what) {}
};

#define MALSCHED_REQUIRE(cond, msg)                                            \
  do {                                                                         \
    if (!(cond)) throw ::malsched::InvariantViolation(msg);                    \
  } while (0)

}  // namespace malsched
