// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <stdexcept>
#include <string>

namespace pmgp {

// Raised when a linear-algebra step cannot be completed (e.g. a Cholesky
// factorization that still fails at the maximum allowed jitter). Argument
// errors use std::invalid_argument instead.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pmgp
