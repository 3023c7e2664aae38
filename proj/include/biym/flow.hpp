#pragma once

#include <cstdint>
#include <vector>

#include "biym/functional.hpp"

namespace biym {

struct FlowConfig {
  std::int64_t max_iters = 50000;
  double residual_tol = 1e-8;   // L2 norm of el_residual
  double initial_step = 1.0;
  double armijo_c = 1e-4;
  double backtrack = 0.5;

  // Optional second solver stage: once the plain descent reaches
  // newton_crossover, switch to Newton steps with a truncated-CG inner
  // solve on the exact Hessian product. Needed when the energy is
  // quartically flat near the minimum (non-commuting constant modes),
  // where first-order descent stalls at a sublinear rate. Requires a
  // uniform metric; off by default.
  bool newton_tail = false;
  double newton_crossover = 1e-4;
  int newton_max_iters = 200;
  int cg_max_iters = 400;

  void validate() const;
};

enum class FlowStatus { Converged, MaxIters, LineSearchFailure };
const char* to_string(FlowStatus s);

struct TraceRow {
  std::int64_t iter;
  double energy;
  double residual;
  double step;
};

struct FlowResult {
  Connection connection;
  FlowStatus status;
  std::vector<TraceRow> trace;
  double final_energy;
  double final_residual;
};

// Gradient descent on the connection coefficients with Armijo
// backtracking; el_residual is the exact gradient, so accepted steps
// decrease the energy monotonically.
FlowResult minimize(const Connection& start, const ConformalMetric& g,
                    const DensityF& F, const FlowConfig& cfg);

// One random algebra element per edge; deterministic per seed.
Connection random_connection(std::shared_ptr<const Lattice> lat, int m,
                             std::uint64_t seed, double amplitude);

}  // namespace biym
