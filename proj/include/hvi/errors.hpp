#ifndef HVI_ERRORS_HPP
#define HVI_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hvi {

// Invalid or inconsistent user-supplied configuration / problem setup.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite values or dimension mismatches produced at a numeric boundary.
struct NumericsError : std::runtime_error {
  explicit NumericsError(const std::string& msg) : std::runtime_error(msg) {}
};

// Iterate norm exceeded the divergence guard.
struct DivergenceError : std::runtime_error {
  explicit DivergenceError(const std::string& msg, long at_iteration)
      : std::runtime_error(msg), iteration(at_iteration) {}
  long iteration = 0;
};

}  // namespace hvi

#endif
