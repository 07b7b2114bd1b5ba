#pragma once

#include <stdexcept>
#include <string>

namespace ecs {

// Raised when a state would have to be normalized from (numerically) zero
// norm, e.g. projecting onto a measurement outcome that cannot occur.
class ZeroNormError : public std::runtime_error {
 public:
  explicit ZeroNormError(const std::string& what) : std::runtime_error(what) {}
};

// Branches or operands that do not agree on (atoms, modes).
class ShapeError : public std::invalid_argument {
 public:
  explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

class IndexError : public std::out_of_range {
 public:
  explicit IndexError(const std::string& what) : std::out_of_range(what) {}
};

// A mode amplitude that is neither +beta nor -beta during qubitization.
class AmplitudeOffGrid : public std::invalid_argument {
 public:
  explicit AmplitudeOffGrid(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed protocol descriptions (bad indices, bad step ordering, parse errors).
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// A consistency check (probability completeness, unitarity) failed.
class ToleranceError : public std::runtime_error {
 public:
  explicit ToleranceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ecs
