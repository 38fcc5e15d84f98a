#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pkgeo {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression or scene text. `offset()` is a zero-based byte
/// offset into the text that was being parsed.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset);

  std::size_t offset() const noexcept { return offset_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string reason_;
  std::size_t offset_;
};

/// Evaluation left the domain of a function (log of a non-positive value,
/// division by zero, ...). Carries the printed offending subexpression.
class DomainError : public Error {
 public:
  DomainError(const std::string& message, std::string subexpression);

  const std::string& subexpression() const noexcept { return subexpression_; }

 private:
  std::string subexpression_;
};

enum class Fault {
  null_point,
  not_lagrangian,
  not_immersion,
  zero_speed,
  branch_fault,
  out_of_domain,
  degenerate,
  not_spacelike,
  non_convergence,
  invalid_argument,
};

const char* to_string(Fault fault) noexcept;

/// A geometric precondition failed at a point (null locus, non-Lagrangian
/// input, chart exit, ...).
class GeometryError : public Error {
 public:
  GeometryError(Fault fault, const std::string& message);

  Fault fault() const noexcept { return fault_; }

 private:
  Fault fault_;
};

}  // namespace pkgeo
