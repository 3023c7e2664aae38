#include "biym/calculus.hpp"

#include <cmath>
#include <stdexcept>

#include "biym/threading.hpp"

namespace biym {

Connection::Connection(PForm a) : alpha(std::move(a)) {
  if (alpha.degree() != 1) {
    throw std::invalid_argument("Connection: alpha must be a 1-form");
  }
}

Connection Connection::flat(std::shared_ptr<const Lattice> lat, int m) {
  return Connection(PForm(std::move(lat), 1, m));
}

PForm d(const Connection& D, const PForm& phi) {
  const int p = phi.degree();
  if (p < 0 || p > 2) {
    throw std::invalid_argument("d: degree must be 0, 1 or 2");
  }
  if (D.fiber_dim() != phi.fiber_dim() ||
      !D.lattice()->same_spec(*phi.lattice())) {
    throw std::invalid_argument("d: connection/form shape mismatch");
  }
  const Lattice& lat = *phi.lattice();
  const int q = p + 1;
  const int nq = lat.num_comps(q);
  const int m = phi.fiber_dim();
  const int mm = m * m;
  const double invh = 1.0 / lat.spacing();
  const std::int64_t nsites = lat.num_sites();

  PForm out(phi.lattice(), q, m);
#pragma omp parallel for schedule(static) if (nsites > kParallelGrain)
  for (std::int64_t x = 0; x < nsites; ++x) {
    for (int cq = 0; cq < nq; ++cq) {
      double* o = out.at(x, cq);
      const auto& tup = lat.tuple(q, cq);
      for (int j = 0; j < q; ++j) {
        const int mu = tup[j];
        const double sgn = (j % 2 == 0) ? 1.0 : -1.0;
        const int cp = lat.remove_axis(q, cq, j);
        const double* f0 = phi.at(x, cp);
        const double* f1 = phi.at(lat.step(x, mu, +1), cp);
        const double* a = D.alpha.at(x, mu);
        for (int k = 0; k < mm; ++k) o[k] += sgn * (f1[k] - f0[k]) * invh;
        alg::bracket_acc(m, sgn, a, f0, o);
      }
    }
  }
  return out;
}

PForm wedge_bracket(const PForm& phi, const PForm& psi) {
  check_same_shape(phi, psi, "wedge_bracket");
  if (phi.degree() != 1) {
    throw std::invalid_argument("wedge_bracket: both arguments must be 1-forms");
  }
  const Lattice& lat = *phi.lattice();
  const int m = phi.fiber_dim();
  const int n2 = lat.num_comps(2);
  const std::int64_t nsites = lat.num_sites();

  PForm out(phi.lattice(), 2, m);
#pragma omp parallel for schedule(static) if (nsites > kParallelGrain)
  for (std::int64_t x = 0; x < nsites; ++x) {
    for (int c = 0; c < n2; ++c) {
      const auto& tup = lat.tuple(2, c);
      double* o = out.at(x, c);
      alg::bracket_acc(m, +1.0, phi.at(x, tup[0]), psi.at(x, tup[1]), o);
      alg::bracket_acc(m, -1.0, phi.at(x, tup[1]), psi.at(x, tup[0]), o);
    }
  }
  return out;
}

PForm curvature(const Connection& D) {
  const Lattice& lat = *D.lattice();
  const int m = D.fiber_dim();
  const int n2 = lat.num_comps(2);
  const int mm = m * m;
  const double invh = 1.0 / lat.spacing();
  const std::int64_t nsites = lat.num_sites();
  const PForm& a = D.alpha;

  PForm out(D.lattice(), 2, m);
#pragma omp parallel for schedule(static) if (nsites > kParallelGrain)
  for (std::int64_t x = 0; x < nsites; ++x) {
    for (int c = 0; c < n2; ++c) {
      const auto& tup = lat.tuple(2, c);
      const int mu = tup[0], nu = tup[1];
      double* o = out.at(x, c);
      const double* amu = a.at(x, mu);
      const double* anu = a.at(x, nu);
      const double* anu_f = a.at(lat.step(x, mu, +1), nu);
      const double* amu_f = a.at(lat.step(x, nu, +1), mu);
      for (int k = 0; k < mm; ++k) {
        o[k] = (anu_f[k] - anu[k]) * invh - (amu_f[k] - amu[k]) * invh;
      }
      alg::bracket_acc(m, 1.0, amu, anu, o);
    }
  }
  return out;
}

PForm delta(const Connection& D, const ConformalMetric& g, const PForm& psi) {
  const int q = psi.degree();
  if (q < 1 || q > 3) {
    throw std::invalid_argument("delta: degree must be 1, 2 or 3");
  }
  if (D.fiber_dim() != psi.fiber_dim() ||
      !D.lattice()->same_spec(*psi.lattice())) {
    throw std::invalid_argument("delta: connection/form shape mismatch");
  }
  if (!psi.lattice()->same_spec(*g.lattice())) {
    throw std::invalid_argument("delta: metric lattice mismatch");
  }
  const Lattice& lat = *psi.lattice();
  const int p = q - 1;
  const int np = lat.num_comps(p);
  const int n = lat.dim();
  const int m = psi.fiber_dim();
  const int mm = m * m;
  const double invh = 1.0 / lat.spacing();
  const std::int64_t nsites = lat.num_sites();

  PForm out(psi.lattice(), p, m);
#pragma omp parallel for schedule(static) if (nsites > kParallelGrain)
  for (std::int64_t x = 0; x < nsites; ++x) {
    const double wp = g.weight(p, x);
    const double wq = g.weight(q, x);
    for (int cp = 0; cp < np; ++cp) {
      double* o = out.at(x, cp);
      for (int mu = 0; mu < n; ++mu) {
        const auto ins = lat.insert_axis(p, cp, mu);
        if (ins.comp < 0) continue;
        const double sgn = static_cast<double>(ins.sign);
        const std::int64_t xm = lat.step(x, mu, -1);
        const double wq_m = g.weight(q, xm);
        const double* y0 = psi.at(x, ins.comp);
        const double* ym = psi.at(xm, ins.comp);
        for (int k = 0; k < mm; ++k) {
          o[k] += sgn * (wq_m * ym[k] - wq * y0[k]) * invh;
        }
        alg::bracket_acc(m, -sgn * wq, D.alpha.at(x, mu), y0, o);
      }
      for (int k = 0; k < mm; ++k) o[k] /= wp;
    }
  }
  return out;
}

PForm interior(const PForm& psi, int axis, const ConformalMetric& g) {
  if (psi.degree() != 2) {
    throw std::invalid_argument("interior: argument must be a 2-form");
  }
  const Lattice& lat = *psi.lattice();
  if (axis < 0 || axis >= lat.dim()) {
    throw std::invalid_argument("interior: axis out of range");
  }
  const int n = lat.dim();
  const int m = psi.fiber_dim();
  const int mm = m * m;
  const double h = lat.spacing();
  const std::int64_t nsites = lat.num_sites();

  PForm out(psi.lattice(), 1, m);
#pragma omp parallel for schedule(static) if (nsites > kParallelGrain)
  for (std::int64_t x = 0; x < nsites; ++x) {
    const double frame = 1.0 / (g.c(x) * h * h);
    for (int nu = 0; nu < n; ++nu) {
      if (nu == axis) continue;
      double* o = out.at(x, nu);
      const double sgn = axis < nu ? frame : -frame;
      const int c = axis < nu ? lat.comp2(axis, nu) : lat.comp2(nu, axis);
      const double* src = psi.at(x, c);
      for (int k = 0; k < mm; ++k) o[k] = sgn * src[k];
    }
  }
  return out;
}

StressTensor::StressTensor(std::shared_ptr<const Lattice> lat)
    : lat_(std::move(lat)), n_(lat_->dim()) {
  s_.assign(static_cast<std::size_t>(lat_->num_sites()) * n_ * n_, 0.0);
}

void StressTensor::set(std::int64_t site, int k, int l, double v) {
  s_[(site * n_ + k) * n_ + l] = v;
  s_[(site * n_ + l) * n_ + k] = v;
}

double StressTensor::trace(std::int64_t site) const {
  double t = 0.0;
  for (int k = 0; k < n_; ++k) t += at(site, k, k);
  return t;
}

double StressTensor::symmetry_defect() const {
  double r = 0.0;
  for (std::int64_t x = 0; x < lat_->num_sites(); ++x) {
    for (int k = 0; k < n_; ++k) {
      for (int l = 0; l < n_; ++l) {
        r = std::max(r, std::fabs(at(x, k, l) - at(x, l, k)));
      }
    }
  }
  return r;
}

namespace {

// Signed component of a stored 2-form: f_{mu nu} with mu, nu arbitrary.
inline double signed_inner2(const Lattice& lat, const PForm& a, const PForm& b,
                            std::int64_t x, int m, int k, int j, int l) {
  // <a_{kj}, b_{lj}> with antisymmetric lookup on both factors
  const double sk = k < j ? 1.0 : -1.0;
  const double sl = l < j ? 1.0 : -1.0;
  const int ca = k < j ? lat.comp2(k, j) : lat.comp2(j, k);
  const int cb = l < j ? lat.comp2(l, j) : lat.comp2(j, l);
  return sk * sl * alg::inner(m, a.at(x, ca), b.at(x, cb));
}

}  // namespace

StressTensor stress_energy(const Connection& D, const ConformalMetric& g,
                           const DensityF& F) {
  const Lattice& lat = *D.lattice();
  const int n = lat.dim();
  const int m = D.fiber_dim();
  const double h = lat.spacing();
  const std::int64_t nsites = lat.num_sites();
  const PForm R = curvature(D);

  StressTensor S(D.lattice());
#pragma omp parallel for schedule(static) if (nsites > kParallelGrain)
  for (std::int64_t x = 0; x < nsites; ++x) {
    const double q = pointwise_norm2(R, g, x);
    const double fv = F.value(0.5 * q);
    const double fd = F.deriv(0.5 * q);
    const double frame2 = 1.0 / (g.c(x) * h * h);
    for (int k = 0; k < n; ++k) {
      for (int l = k; l < n; ++l) {
        double mkl = 0.0;
        for (int j = 0; j < n; ++j) {
          if (j == k || j == l) continue;
          mkl += signed_inner2(lat, R, R, x, m, k, j, l);
        }
        mkl *= frame2 * frame2;
        S.set(x, k, l, (k == l ? fv : 0.0) - fd * mkl);
      }
    }
  }
  return S;
}

CovectorField::CovectorField(std::shared_ptr<const Lattice> l)
    : lat(std::move(l)) {
  v.assign(static_cast<std::size_t>(lat->num_sites()) * lat->dim(), 0.0);
}

double CovectorField::l2_norm() const {
  const double voln = std::pow(lat->spacing(), lat->dim());
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s * voln);
}

double CovectorField::max_abs() const {
  double r = 0.0;
  for (double x : v) r = std::max(r, std::fabs(x));
  return r;
}

CovectorField div_direct(const StressTensor& S, const ConformalMetric& g) {
  if (!g.is_uniform()) {
    throw UnsupportedConfig("div_direct: requires a uniform metric");
  }
  const Lattice& lat = *S.lattice();
  const int n = lat.dim();
  const double invh = 1.0 / lat.spacing();
  const double fr = 1.0 / std::sqrt(g.uniform_value());
  const std::int64_t nsites = lat.num_sites();

  CovectorField out(S.lattice());
#pragma omp parallel for schedule(static) if (nsites > kParallelGrain)
  for (std::int64_t x = 0; x < nsites; ++x) {
    for (int k = 0; k < n; ++k) {
      double acc = 0.0;
      for (int mu = 0; mu < n; ++mu) {
        acc += (S.at(lat.step(x, mu, +1), mu, k) - S.at(x, mu, k)) * invh;
      }
      out.at(x, k) = fr * acc;
    }
  }
  return out;
}

DivFormula div_formula(const Connection& D, const ConformalMetric& g) {
  if (!g.is_uniform()) {
    throw UnsupportedConfig("div_formula: requires a uniform metric");
  }
  const Lattice& lat = *D.lattice();
  const int n = lat.dim();
  const int m = D.fiber_dim();
  const double h = lat.spacing();
  const double u = g.uniform_value();
  const double frame2 = 1.0 / (u * h * h);
  const double fr = 1.0 / std::sqrt(u);
  const std::int64_t nsites = lat.num_sites();

  const PForm R = curvature(D);
  const std::vector<double> q = pointwise_norm2_field(R, g);
  std::vector<double> s(nsites);
  for (std::int64_t x = 0; x < nsites; ++x) s[x] = 1.0 / std::sqrt(1.0 + q[x]);

  // first factor, termwise: s delta(R) - i_{grad s} R with the gradient
  // taken by forward differences
  const PForm dltR = delta(D, g, R);
  const PForm dR = d(D, R);
  const double invh = 1.0 / h;

  // the exact Euler-Lagrange residual delta(s R), reported alongside
  PForm sR = R;
  scale_by_site(sR, s);
  const PForm el = delta(D, g, sR);

  DivFormula res{CovectorField(D.lattice()), CovectorField(D.lattice()),
                 CovectorField(D.lattice()), 0.0};
  res.residual_factor_norm = norm_form(el, g);

#pragma omp parallel for schedule(static) if (nsites > kParallelGrain)
  for (std::int64_t x = 0; x < nsites; ++x) {
    for (int k = 0; k < n; ++k) {
      // < s delta(R) - i_{grad s} R, i_k R >
      double v1 = 0.0;
      for (int nu = 0; nu < n; ++nu) {
        if (nu == k) continue;
        const double sgn_k = k < nu ? 1.0 : -1.0;
        const int c_k = k < nu ? lat.comp2(k, nu) : lat.comp2(nu, k);
        double factor[AlgebraElement::kMaxDim * AlgebraElement::kMaxDim];
        const double* dv = dltR.at(x, nu);
        const int mm = m * m;
        for (int e = 0; e < mm; ++e) factor[e] = s[x] * dv[e];
        for (int mu = 0; mu < n; ++mu) {
          if (mu == nu) continue;
          const double grad_mu =
              (s[lat.step(x, mu, +1)] - s[x]) * invh;
          const double sgn_mu = mu < nu ? 1.0 : -1.0;
          const int c_mu = mu < nu ? lat.comp2(mu, nu) : lat.comp2(nu, mu);
          const double* rv = R.at(x, c_mu);
          for (int e = 0; e < mm; ++e) {
            factor[e] -= grad_mu * sgn_mu * frame2 * rv[e];
          }
        }
        v1 += sgn_k * frame2 * alg::inner(m, factor, R.at(x, c_k));
      }
      // s < i_k dR, R >
      double v2 = 0.0;
      for (int nu = 0; nu < n; ++nu) {
        for (int rho = nu + 1; rho < n; ++rho) {
          if (nu == k || rho == k) continue;
          double sgn;
          int c3;
          if (k < nu) {
            sgn = 1.0;
            c3 = lat.comp3(k, nu, rho);
          } else if (k < rho) {
            sgn = -1.0;
            c3 = lat.comp3(nu, k, rho);
          } else {
            sgn = 1.0;
            c3 = lat.comp3(nu, rho, k);
          }
          v2 += sgn * frame2 * frame2 *
                alg::inner(m, dR.at(x, c3), R.at(x, lat.comp2(nu, rho)));
        }
      }
      v2 *= s[x];
      res.coderivative_term.at(x, k) = fr * v1;
      res.bianchi_term.at(x, k) = fr * v2;
      res.total.at(x, k) = fr * (v1 + v2);
    }
  }
  return res;
}

}  // namespace biym
