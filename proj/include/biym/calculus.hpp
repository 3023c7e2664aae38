#pragma once

#include <memory>
#include <vector>

#include "biym/density.hpp"
#include "biym/errors.hpp"
#include "biym/lattice.hpp"

namespace biym {

// Connection D = d + alpha on the trivial bundle; alpha acts on algebra-
// valued forms by commutator. All bracket terms anchor at the cell's base
// site, which makes the variational identities below exact at fixed h.
struct Connection {
  PForm alpha;

  explicit Connection(PForm a);
  static Connection flat(std::shared_ptr<const Lattice> lat, int m);

  const std::shared_ptr<const Lattice>& lattice() const {
    return alpha.lattice();
  }
  int fiber_dim() const { return alpha.fiber_dim(); }
};

// Twisted exterior derivative, degrees 0, 1, 2. Forward differences plus
// base-site commutators.
PForm d(const Connection& D, const PForm& phi);

// [phi ^ psi](X, Y) = [phi(X), psi(Y)] - [phi(Y), psi(X)] for 1-forms.
PForm wedge_bracket(const PForm& phi, const PForm& psi);

// R_{mu nu} = d_mu alpha_nu - d_nu alpha_mu + [alpha_mu, alpha_nu].
PForm curvature(const Connection& D);

// Exact adjoint of d with respect to the weighted pairing, degrees 1..3.
PForm delta(const Connection& D, const ConformalMetric& g, const PForm& psi);

// Contraction of a 2-form with a coordinate direction; the result carries
// orthonormal-frame components (one factor 1/(sqrt(c) h) per slot).
PForm interior(const PForm& psi, int axis, const ConformalMetric& g);

// Per-site symmetric n x n tensor in the orthonormal frame.
class StressTensor {
 public:
  StressTensor(std::shared_ptr<const Lattice> lat);

  const std::shared_ptr<const Lattice>& lattice() const { return lat_; }
  double at(std::int64_t site, int k, int l) const {
    return s_[(site * n_ + k) * n_ + l];
  }
  void set(std::int64_t site, int k, int l, double v);
  double trace(std::int64_t site) const;
  double symmetry_defect() const;

 private:
  std::shared_ptr<const Lattice> lat_;
  int n_;
  std::vector<double> s_;
};

// S_kl = F(Q/2) delta_kl - F'(Q/2) sum_j <R_kj, R_lj> in the frame at x.
StressTensor stress_energy(const Connection& D, const ConformalMetric& g,
                           const DensityF& F);

struct CovectorField {
  std::shared_ptr<const Lattice> lat;
  std::vector<double> v;  // nsites * n

  explicit CovectorField(std::shared_ptr<const Lattice> l);
  double& at(std::int64_t site, int k) { return v[site * lat->dim() + k]; }
  double at(std::int64_t site, int k) const {
    return v[site * lat->dim() + k];
  }
  double l2_norm() const;  // sqrt(sum_x h^n sum_k v^2)
  double max_abs() const;
};

// (div S)_k = sum_mu forward-difference_mu S_{mu k}; uniform metric only.
CovectorField div_direct(const StressTensor& S, const ConformalMetric& g);

struct DivFormula {
  CovectorField total;
  // term pairing delta(F' R) against i_X R; vanishes at critical points
  CovectorField coderivative_term;
  // term containing d^D R^D; vanishes only as the Bianchi residual does
  CovectorField bianchi_term;
  double residual_factor_norm;  // L2 norm of delta(F' R)
};

// Termwise evaluation of the divergence formula for the Born-Infeld
// stress tensor; uniform metric only. The gradient/interior piece is
// discretized so that it combines with F' delta R into exactly
// delta(F' R), the Euler-Lagrange residual.
DivFormula div_formula(const Connection& D, const ConformalMetric& g);

}  // namespace biym
