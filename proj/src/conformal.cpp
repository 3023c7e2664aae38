#include "biym/conformal.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace biym {

namespace {

void require_dim(int n, const char* where) {
  if (n < 5) {
    throw UnsupportedConfig(std::string(where) +
                            ": requires base dimension n >= 5 (the "
                            "rescaling degenerates at n = 4)");
  }
}

}  // namespace

double bi_profile(double t) {
  if (t < 0.0) throw std::domain_error("bi_profile: t must be >= 0");
  return 2.0 * t / (std::sqrt(1.0 + 2.0 * t) + 1.0);
}

double bi_profile_deriv(double t) {
  if (t < 0.0) throw std::domain_error("bi_profile_deriv: t must be >= 0");
  return 1.0 / std::sqrt(1.0 + 2.0 * t);
}

double bi_slope_inverse(double y) {
  if (!(y > 0.0) || y > 1.0) {
    throw std::domain_error("bi_slope_inverse: y must be in (0, 1]");
  }
  return 0.5 * (1.0 / (y * y) - 1.0);
}

double conformal_profile(double y, int n) {
  require_dim(n, "conformal_profile");
  if (!(y > 0.0) || y > 1.0) {
    throw std::domain_error("conformal_profile: y must be in (0, 1]");
  }
  // (y^(4-n) - 1) / (2 y^2) written to avoid the 0/0 shape at y = 1
  return 0.5 * (std::pow(y, 2.0 - n) - std::pow(y, -2.0));
}

double conformal_profile_deriv(double y, int n) {
  require_dim(n, "conformal_profile_deriv");
  if (!(y > 0.0) || y > 1.0) {
    throw std::domain_error("conformal_profile_deriv: y must be in (0, 1]");
  }
  return 0.5 * ((2.0 - n) * std::pow(y, 1.0 - n) + 2.0 * std::pow(y, -3.0));
}

double conformal_factor(double t, int n, double tol) {
  require_dim(n, "conformal_factor");
  if (t < 0.0) throw std::domain_error("conformal_factor: t must be >= 0");
  if (t == 0.0) return 1.0;

  // conformal_profile is strictly decreasing from +inf to 0 on (0, 1]
  double hi = 1.0;
  double lo = 0.5;
  while (conformal_profile(lo, n) < t) {
    lo *= 0.5;
    if (lo < 1e-300) {
      throw NoConvergence("conformal_factor: bracket collapse at t = " +
                          std::to_string(t));
    }
  }
  for (int it = 0; it < 200 && (hi - lo) > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (conformal_profile(mid, n) >= t) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double y = 0.5 * (lo + hi);
  for (int it = 0; it < 8; ++it) {
    const double r = conformal_profile(y, n) - t;
    if (std::fabs(r) <= 1e-15 * std::max(1.0, t)) break;
    double ynext = y - r / conformal_profile_deriv(y, n);
    if (!(ynext > 0.0)) ynext = 0.5 * y;
    if (ynext > 1.0) ynext = 1.0;
    y = ynext;
  }
  const double resid = std::fabs(conformal_profile(y, n) - t);
  if (resid > tol * std::max(1.0, t)) {
    throw NoConvergence(
        "conformal_factor: residual " + std::to_string(resid) +
        " above tolerance, bracket [" + std::to_string(lo) + ", " +
        std::to_string(hi) + "] at t = " + std::to_string(t));
  }
  return y;
}

SigmaField::SigmaField(std::vector<double> sigma, int n, double max_residual)
    : sigma_(std::move(sigma)), n_(n), max_residual_(max_residual) {}

double SigmaField::min_value() const {
  double r = 1.0;
  for (double v : sigma_) r = std::min(r, v);
  return r;
}

double SigmaField::max_value() const {
  double r = 0.0;
  for (double v : sigma_) r = std::max(r, v);
  return r;
}

SigmaField sigma_field(const Connection& D, const ConformalMetric& g) {
  const int n = D.lattice()->dim();
  require_dim(n, "sigma_field");
  const PForm R = curvature(D);
  const std::vector<double> q = pointwise_norm2_field(R, g);
  std::vector<double> sigma(q.size());
  double max_resid = 0.0;
  for (std::size_t x = 0; x < q.size(); ++x) {
    const double s = conformal_factor(0.5 * q[x], n);
    sigma[x] = s;
    const double resid = std::fabs(
        std::pow(s, 0.5 * (n - 4)) * std::sqrt(1.0 + s * s * q[x]) - 1.0);
    max_resid = std::max(max_resid, resid);
  }
  return SigmaField(std::move(sigma), n, max_resid);
}

ConformalMetric rescale_metric(const ConformalMetric& g, const SigmaField& s) {
  const std::int64_t nsites = g.lattice()->num_sites();
  if (static_cast<std::int64_t>(s.field().size()) != nsites) {
    throw std::invalid_argument("rescale_metric: field size mismatch");
  }
  std::vector<double> c(nsites);
  for (std::int64_t x = 0; x < nsites; ++x) c[x] = g.c(x) / s.at(x);
  return ConformalMetric::from_field(g.lattice(), std::move(c));
}

Step2Report step2_verify(const Connection& D, const ConformalMetric& g) {
  const Lattice& lat = *D.lattice();
  const int n = lat.dim();
  require_dim(n, "step2_verify");
  const int nn = lat.num_comps(1);
  const int mm = D.fiber_dim() * D.fiber_dim();

  const PForm R = curvature(D);
  const PForm r_ym = delta(D, g, R);
  const SigmaField sf = sigma_field(D, g);
  const ConformalMetric gt = rescale_metric(g, sf);
  const PForm r_bi = el_residual(D, gt, DensityF::born_infeld());

  Step2Report rep{};
  rep.r_ym_norm = norm_form(r_ym, g);
  rep.r_bi_norm = norm_form(r_bi, g);
  rep.r_bi_norm_rescaled = norm_form(r_bi, gt);
  rep.functional_eq_residual = sf.max_equation_residual();
  rep.sigma_min = sf.min_value();
  rep.sigma_max = sf.max_value();

  double max_pow = 0.0;
  double ym_scale = 0.0;
  double defect = 0.0;
  for (std::int64_t x = 0; x < lat.num_sites(); ++x) {
    const double spow = std::pow(sf.at(x), 0.5 * n - 1.0);
    max_pow = std::max(max_pow, spow);
    for (int c = 0; c < nn; ++c) {
      const double* a = r_bi.at(x, c);
      const double* b = r_ym.at(x, c);
      for (int k = 0; k < mm; ++k) {
        defect = std::max(defect, std::fabs(a[k] - spow * b[k]));
        ym_scale = std::max(ym_scale, std::fabs(b[k]));
      }
    }
  }
  rep.max_sigma_pow = max_pow;
  rep.proportionality_defect = defect / (1.0 + ym_scale * max_pow);
  return rep;
}

Step1Report step1_weight(const Connection& D, const ConformalMetric& g,
                         double p) {
  const Lattice& lat = *D.lattice();
  const int n = lat.dim();
  require_dim(n, "step1_weight");
  if (!(2.0 * p > n)) {
    throw std::invalid_argument("step1_weight: requires 2p > n");
  }
  const int nn = lat.num_comps(1);
  const int mm = D.fiber_dim() * D.fiber_dim();
  const std::int64_t nsites = lat.num_sites();

  const PForm R = curvature(D);
  const std::vector<double> q = pointwise_norm2_field(R, g);

  std::vector<double> f(nsites), w(nsites), cbar(nsites);
  double fmin = 1e300, fmax = 0.0;
  for (std::int64_t x = 0; x < nsites; ++x) {
    f[x] = std::pow(1.0 + q[x], (p - 2.0) / (n - 4.0));
    w[x] = std::pow(1.0 + q[x], 0.5 * (p - 2.0));  // = f^((n-4)/2)
    cbar[x] = f[x] * g.c(x);
    fmin = std::min(fmin, f[x]);
    fmax = std::max(fmax, f[x]);
  }
  const ConformalMetric gbar =
      ConformalMetric::from_field(D.lattice(), std::move(cbar));

  PForm wR = R;
  scale_by_site(wR, w);
  const PForm r_weighted = delta(D, g, wR);
  const PForm r_bar = delta(D, gbar, R);

  Step1Report rep{};
  rep.r_weighted_norm = norm_form(r_weighted, g);
  rep.r_rescaled_norm = norm_form(r_bar, gbar);
  rep.f_min = fmin;
  rep.f_max = fmax;

  double defect = 0.0, scale = 0.0;
  for (std::int64_t x = 0; x < nsites; ++x) {
    const double fac = std::pow(f[x], 1.0 - 0.5 * n);
    for (int c = 0; c < nn; ++c) {
      const double* a = r_bar.at(x, c);
      const double* b = r_weighted.at(x, c);
      for (int k = 0; k < mm; ++k) {
        defect = std::max(defect, std::fabs(a[k] - fac * b[k]));
        scale = std::max(scale, std::fabs(fac * b[k]));
      }
    }
  }
  rep.identity_defect = defect / (1.0 + scale);
  return rep;
}

}  // namespace biym
