#pragma once

#include <vector>

#include "biym/calculus.hpp"
#include "biym/functional.hpp"

namespace biym {

// Scalar chain used to build the conformal factor. bi_profile is the
// Born-Infeld integrand profile; bi_slope_inverse inverts its derivative
// in closed form; conformal_profile is the strictly decreasing function
// on (0, 1] whose root at level t gives the factor.
double bi_profile(double t);                 // sqrt(1+2t) - 1, t >= 0
double bi_profile_deriv(double t);           // 1/sqrt(1+2t)
double bi_slope_inverse(double y);           // (y^-2 - 1)/2, y in (0, 1]
double conformal_profile(double y, int n);   // (y^(4-n) - 1)/(2 y^2), n >= 5
double conformal_profile_deriv(double y, int n);

// The unique sigma in (0, 1] with conformal_profile(sigma, n) = t, found
// by bisection and Newton polish. Relative residual <= tol.
double conformal_factor(double t, int n, double tol = 1e-12);

// Per-site conformal factor field; satisfies the pointwise equation
// sigma^((n-4)/2) sqrt(1 + sigma^2 Q) = 1.
class SigmaField {
 public:
  SigmaField(std::vector<double> sigma, int n, double max_residual);

  double at(std::int64_t site) const { return sigma_[site]; }
  const std::vector<double>& field() const { return sigma_; }
  int base_dim() const { return n_; }
  double max_equation_residual() const { return max_residual_; }
  double min_value() const;
  double max_value() const;

 private:
  std::vector<double> sigma_;
  int n_;
  double max_residual_;
};

// sigma(x) = conformal_factor(Q(x)/2, n) with Q measured under g.
SigmaField sigma_field(const Connection& D, const ConformalMetric& g);

// g~ = sigma^-1 g, i.e. c~(x) = c(x) / sigma(x).
ConformalMetric rescale_metric(const ConformalMetric& g, const SigmaField& s);

struct Step2Report {
  double r_ym_norm;          // |delta_g R| under g
  double r_bi_norm;          // |el_residual(D, g~, BI)| under g
  double r_bi_norm_rescaled; // same field, norm under g~
  double max_sigma_pow;      // max sigma^(n/2 - 1)
  double proportionality_defect;  // cellwise r_bi vs sigma^(n/2-1) r_ym
  double functional_eq_residual;
  double sigma_min;
  double sigma_max;
};

// Builds sigma and g~ from (D, g) and verifies the discrete rescaling
// identity r_bi(x) = sigma(x)^(n/2-1) r_ym(x) cellwise.
Step2Report step2_verify(const Connection& D, const ConformalMetric& g);

struct Step1Report {
  double r_weighted_norm;    // |delta_g((1+Q)^((p-2)/2) R)| under g
  double r_rescaled_norm; // |delta_gbar R| under gbar
  double identity_defect; // cellwise delta_gbar R vs f^(1-n/2) delta_g(f^((n-4)/2) R)
  double f_min;
  double f_max;
};

// f = (1+Q)^((p-2)/(n-4)), gbar = f g; checks that criticality of the
// weighted residual under g is the same statement as plain-curvature
// criticality under gbar. Requires 2p > n.
Step1Report step1_weight(const Connection& D, const ConformalMetric& g,
                         double p);

}  // namespace biym
