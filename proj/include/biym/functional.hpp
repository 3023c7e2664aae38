#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "biym/calculus.hpp"

namespace biym {

// Total energy: sum over sites of vol(x) F(Q(x)/2), Q the pointwise
// squared curvature norm.
double energy(const Connection& D, const ConformalMetric& g,
              const DensityF& F);

// delta(F'(Q/2) R): the exact gradient of the energy with respect to the
// weighted L2 product on 1-forms. Vanishes exactly at critical points.
PForm el_residual(const Connection& D, const ConformalMetric& g,
                  const DensityF& F);

struct FirstVariation {
  double pairing_two_form;  // <dB, F'(Q/2) R> in the 2-form pairing
  double pairing_one_form;  // <B, el_residual> in the 1-form pairing
};
FirstVariation first_variation(const Connection& D, const PForm& B,
                               const ConformalMetric& g, const DensityF& F);

// (RB)_nu = sum_mu [Rhat_{mu nu}, B_mu] with frame-normalized curvature;
// uniform metric only.
PForm curvature_operator(const Connection& D, const PForm& B,
                         const ConformalMetric& g);

// Second derivative of the energy along the straight line D + t B,
// evaluated at t = 0; exact at any D. Uniform metric only.
double hess_quadratic(const Connection& D, const PForm& B,
                      const ConformalMetric& g, const DensityF& F);

// The symmetric operator whose 1-form pairing reproduces hess_quadratic:
// S(B) = delta(F' dB + F'' <dB,R> R) + F' (RB). Uniform metric only.
PForm hess_operator(const Connection& D, const PForm& B,
                    const ConformalMetric& g, const DensityF& F);

struct MetricVariation {
  double stress_pairing;  // 0.5 sum u tr(S) vol
  double closed_form;     // sum vol (n/2 u F - u Q F')
};
// Rate of change of the energy under the conformal variation
// c -> (1 + s u) c at s = 0, both as the stress-tensor pairing and in
// closed form; the two agree identically.
MetricVariation metric_variation(const Connection& D,
                                 const ConformalMetric& g, const DensityF& F,
                                 const std::vector<double>& u);

struct SpectrumOptions {
  int dense_limit = 4000;
  bool force_iterative = false;
  int max_lanczos = 0;  // 0 = auto
  std::uint64_t seed = 7;
  bool want_gauge_rank = true;
};

struct SpectrumResult {
  std::vector<double> eigenvalues;  // ascending, the k lowest
  int index = 0;                    // eigenvalues < -tau
  int nullity = 0;                  // |eigenvalue| <= tau
  double tau = 0.0;
  int gauge_rank = -1;  // rank of d on 0-forms; -1 when not computed
  bool converged = true;
  double max_residual = 0.0;  // iterative path: worst Ritz residual bound
  std::int64_t dim = 0;
  std::string method;
};

// Lowest k eigenvalues of the second-variation operator on 1-forms.
// Dense solve up to opts.dense_limit, Lanczos beyond. Uniform metric only.
SpectrumResult spectrum(const Connection& D, const ConformalMetric& g,
                        const DensityF& F, int k, double tau,
                        const SpectrumOptions& opts = {});

// Flattening of 1-forms onto coefficient vectors over the orthonormal
// so(m) generators; shared by the eigensolvers and their tests.
std::vector<double> flatten_one_form(const PForm& B);
PForm unflatten_one_form(const std::vector<double>& x,
                         std::shared_ptr<const Lattice> lat, int m);

}  // namespace biym
