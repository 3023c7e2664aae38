#pragma once

#include <stdexcept>

namespace biym {

// A request that is well-formed but outside what the discretization
// supports (e.g. divergence operators under a non-uniform metric).
struct UnsupportedConfig : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed run configuration (unknown key, bad value, missing file).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An iterative solve that failed to reach its tolerance.
struct NoConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace biym
