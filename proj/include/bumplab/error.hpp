#pragma once

#include <stdexcept>
#include <string>

namespace bumplab {

/// Bad input: violated preconditions, malformed configs, unknown builders.
class ValidationError : public std::invalid_argument {
public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// An iterative routine failed to converge or left the floating range.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

} // namespace bumplab
