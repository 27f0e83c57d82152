#pragma once

#include <stdexcept>
#include <string>

namespace bernstein {

//! Argument outside the mathematical domain of an operation
//! (index out of range, point outside the support, bad partition).
class DomainError : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

//! Data that cannot support the requested estimate, e.g. zero variance.
class DegenerateDataError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! The change-point profile is flat (l_k == l_0), so no degree can be chosen.
class SelectionDegenerateError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! Malformed input file; carries the 1-based line number when known.
class InputError : public std::runtime_error
{
public:
  explicit InputError(const std::string& what, std::size_t line = 0)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what
                              : what)
    , line_(line)
  {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

//! The Monte Carlo harness lost too many replicates to fit failures.
class HarnessError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

} // namespace bernstein
