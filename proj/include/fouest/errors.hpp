#pragma once

#include <stdexcept>
#include <string>

namespace fouest {

// Thrown when a quadrature, factorization or sampling step cannot deliver a
// finite result at the requested accuracy.  CLI maps this to exit code 4.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a verification assertion fails.  CLI maps this to exit code 3.
class assertion_error : public std::runtime_error {
 public:
  explicit assertion_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fouest
