#pragma once

#include <stdexcept>
#include <string>

namespace toposym {

// Thrown when an input description is malformed (bad source ids, empty
// simplex, asymmetric output complex, unparseable file, ...).
struct InvalidConfig : std::runtime_error {
  explicit InvalidConfig(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a facet or output row does not cover the expected name set.
struct InvalidArity : InvalidConfig {
  explicit InvalidArity(const std::string& what) : InvalidConfig(what) {}
};

// Thrown when an exhaustive enumeration or structural expansion would
// exceed its configured cap. Callers may retry with a larger cap.
struct CapExceeded : std::runtime_error {
  explicit CapExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Thrown by check_simplicial_map when the vertex map does not cover the
// source vertex set.
struct MapIncomplete : std::runtime_error {
  explicit MapIncomplete(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a generated combinatorial object fails its own validity
// audit (e.g. a port table row that is not a bijection). Construction is
// never silently patched.
struct InvalidConstruction : std::logic_error {
  explicit InvalidConstruction(const std::string& what) : std::logic_error(what) {}
};

}  // namespace toposym
