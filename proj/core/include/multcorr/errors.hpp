#pragma once

#include <stdexcept>
#include <string>

namespace multcorr {

// Request exceeds a documented implementation limit (word size, arena slots,
// combinatorial blowup).  Mapped to the domain-error exit code by the CLI.
class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical procedure failed to produce a usable value (non-finite or
// non-positive solution of the delay equation, quadrature breakdown).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace multcorr
