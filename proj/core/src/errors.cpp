#include "pkgeo/errors.hpp"

#include <utility>

namespace pkgeo {

ParseError::ParseError(const std::string& message, std::size_t offset)
    : Error("syntax error at offset " + std::to_string(offset) + ": " + message),
      reason_(message),
      offset_(offset) {}

DomainError::DomainError(const std::string& message, std::string subexpression)
    : Error(message + " in '" + subexpression + "'"),
      subexpression_(std::move(subexpression)) {}

const char* to_string(Fault fault) noexcept {
  switch (fault) {
    case Fault::null_point: return "null point";
    case Fault::not_lagrangian: return "not Lagrangian";
    case Fault::not_immersion: return "not an immersion";
    case Fault::zero_speed: return "zero speed";
    case Fault::branch_fault: return "branch fault";
    case Fault::out_of_domain: return "out of domain";
    case Fault::degenerate: return "degenerate";
    case Fault::not_spacelike: return "not space-like";
    case Fault::non_convergence: return "non-convergence";
    case Fault::invalid_argument: return "invalid argument";
  }
  return "unknown";
}

GeometryError::GeometryError(Fault fault, const std::string& message)
    : Error(std::string(to_string(fault)) + ": " + message), fault_(fault) {}

}  // namespace pkgeo
