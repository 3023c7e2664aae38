#pragma once

#include "biym/calculus.hpp"

// Serial reference implementations of the lattice kernels, written as the
// plain per-degree formulas with full antisymmetric lookups instead of the
// table-driven parallel versions. Kept for testing and benchmarking.
namespace biym::ref {

PForm d(const Connection& D, const PForm& phi);
PForm curvature(const Connection& D);
PForm wedge_bracket(const PForm& phi, const PForm& psi);
PForm delta(const Connection& D, const ConformalMetric& g, const PForm& psi);
double inner_form(const PForm& a, const PForm& b, const ConformalMetric& g);
StressTensor stress_energy(const Connection& D, const ConformalMetric& g,
                           const DensityF& F);

}  // namespace biym::ref
