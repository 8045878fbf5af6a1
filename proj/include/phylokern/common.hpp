#ifndef PHYLOKERN_COMMON_HPP
#define PHYLOKERN_COMMON_HPP

#include <stdexcept>
#include <string>

namespace phylokern {

// Input data that fails validation (bad file contents, misaligned ids,
// out-of-range parameters). CLI maps this to exit code 3.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure (factorization breakdown, degenerate scale, no finite
// objective). CLI maps this to exit code 4.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace phylokern

#endif  // PHYLOKERN_COMMON_HPP
