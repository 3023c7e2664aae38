#include "biym/reference.hpp"

#include <stdexcept>

namespace biym::ref {

namespace {

using biym::AlgebraElement;

AlgebraElement get1(const PForm& f, std::int64_t x, int mu) {
  return f.get(x, mu);
}

// full antisymmetric lookup of a 2-form component
AlgebraElement get2(const PForm& f, std::int64_t x, int mu, int nu) {
  const Lattice& lat = *f.lattice();
  AlgebraElement v(f.fiber_dim());
  if (mu == nu) return v;
  if (mu < nu) return f.get(x, lat.comp2(mu, nu));
  v = f.get(x, lat.comp2(nu, mu));
  v *= -1.0;
  return v;
}

// full antisymmetric lookup of a 3-form component
AlgebraElement get3(const PForm& f, std::int64_t x, int a, int b, int c) {
  const Lattice& lat = *f.lattice();
  AlgebraElement zero(f.fiber_dim());
  if (a == b || b == c || a == c) return zero;
  int p[3] = {a, b, c};
  double sgn = 1.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2 - i; ++j) {
      if (p[j] > p[j + 1]) {
        std::swap(p[j], p[j + 1]);
        sgn = -sgn;
      }
    }
  }
  AlgebraElement v = f.get(x, lat.comp3(p[0], p[1], p[2]));
  v *= sgn;
  return v;
}

AlgebraElement fwd_diff(const PForm& f, const Lattice& lat, std::int64_t x,
                        int mu, int comp) {
  AlgebraElement v = f.get(lat.step(x, mu, +1), comp);
  v -= f.get(x, comp);
  v *= 1.0 / lat.spacing();
  return v;
}

}  // namespace

PForm d(const Connection& D, const PForm& phi) {
  const Lattice& lat = *phi.lattice();
  const int n = lat.dim();
  const int p = phi.degree();
  if (p < 0 || p > 2) throw std::invalid_argument("ref::d: bad degree");

  PForm out(phi.lattice(), p + 1, phi.fiber_dim());
  for (std::int64_t x = 0; x < lat.num_sites(); ++x) {
    if (p == 0) {
      const AlgebraElement s = phi.get(x, 0);
      for (int mu = 0; mu < n; ++mu) {
        AlgebraElement v = fwd_diff(phi, lat, x, mu, 0);
        v += bracket(D.alpha.get(x, mu), s);
        out.set(x, mu, v);
      }
    } else if (p == 1) {
      for (int mu = 0; mu < n; ++mu) {
        for (int nu = mu + 1; nu < n; ++nu) {
          AlgebraElement v = fwd_diff(phi, lat, x, mu, nu);
          v -= fwd_diff(phi, lat, x, nu, mu);
          v += bracket(D.alpha.get(x, mu), phi.get(x, nu));
          v -= bracket(D.alpha.get(x, nu), phi.get(x, mu));
          out.set(x, lat.comp2(mu, nu), v);
        }
      }
    } else {
      for (int mu = 0; mu < n; ++mu) {
        for (int nu = mu + 1; nu < n; ++nu) {
          for (int rho = nu + 1; rho < n; ++rho) {
            const int cnr = lat.comp2(nu, rho);
            const int cmr = lat.comp2(mu, rho);
            const int cmn = lat.comp2(mu, nu);
            AlgebraElement v = fwd_diff(phi, lat, x, mu, cnr);
            v -= fwd_diff(phi, lat, x, nu, cmr);
            v += fwd_diff(phi, lat, x, rho, cmn);
            v += bracket(D.alpha.get(x, mu), phi.get(x, cnr));
            v -= bracket(D.alpha.get(x, nu), phi.get(x, cmr));
            v += bracket(D.alpha.get(x, rho), phi.get(x, cmn));
            out.set(x, lat.comp3(mu, nu, rho), v);
          }
        }
      }
    }
  }
  return out;
}

PForm wedge_bracket(const PForm& phi, const PForm& psi) {
  const Lattice& lat = *phi.lattice();
  const int n = lat.dim();
  PForm out(phi.lattice(), 2, phi.fiber_dim());
  for (std::int64_t x = 0; x < lat.num_sites(); ++x) {
    for (int mu = 0; mu < n; ++mu) {
      for (int nu = mu + 1; nu < n; ++nu) {
        AlgebraElement v = bracket(phi.get(x, mu), psi.get(x, nu));
        v -= bracket(phi.get(x, nu), psi.get(x, mu));
        out.set(x, lat.comp2(mu, nu), v);
      }
    }
  }
  return out;
}

PForm curvature(const Connection& D) {
  // the alternate route: d of alpha under the flat connection plus half
  // the self-bracket
  const Connection flat =
      Connection::flat(D.lattice(), D.fiber_dim());
  PForm out = ref::d(flat, D.alpha);
  PForm wb = ref::wedge_bracket(D.alpha, D.alpha);
  wb.scale(0.5);
  out.axpy(1.0, wb);
  return out;
}

PForm delta(const Connection& D, const ConformalMetric& g, const PForm& psi) {
  const Lattice& lat = *psi.lattice();
  const int n = lat.dim();
  const int m = psi.fiber_dim();
  const double invh = 1.0 / lat.spacing();
  const int q = psi.degree();
  if (q < 1 || q > 3) throw std::invalid_argument("ref::delta: bad degree");

  PForm out(psi.lattice(), q - 1, m);
  for (std::int64_t x = 0; x < lat.num_sites(); ++x) {
    const double wp = g.weight(q - 1, x);
    const double wq = g.weight(q, x);
    auto term = [&](int mu, const AlgebraElement& here,
                    const AlgebraElement& back,
                    double wq_back) -> AlgebraElement {
      AlgebraElement v = back;
      v *= wq_back * invh;
      AlgebraElement v2 = here;
      v2 *= wq * invh;
      v -= v2;
      AlgebraElement br = bracket(D.alpha.get(x, mu), here);
      br *= wq;
      v -= br;
      return v;
    };
    if (q == 1) {
      AlgebraElement acc(m);
      for (int mu = 0; mu < n; ++mu) {
        const std::int64_t xm = lat.step(x, mu, -1);
        acc += term(mu, get1(psi, x, mu), get1(psi, xm, mu),
                    g.weight(1, xm));
      }
      acc *= 1.0 / wp;
      out.set(x, 0, acc);
    } else if (q == 2) {
      for (int nu = 0; nu < n; ++nu) {
        AlgebraElement acc(m);
        for (int mu = 0; mu < n; ++mu) {
          const std::int64_t xm = lat.step(x, mu, -1);
          acc += term(mu, get2(psi, x, mu, nu), get2(psi, xm, mu, nu),
                      g.weight(2, xm));
        }
        acc *= 1.0 / wp;
        out.set(x, nu, acc);
      }
    } else {
      for (int nu = 0; nu < n; ++nu) {
        for (int rho = nu + 1; rho < n; ++rho) {
          AlgebraElement acc(m);
          for (int mu = 0; mu < n; ++mu) {
            const std::int64_t xm = lat.step(x, mu, -1);
            acc += term(mu, get3(psi, x, mu, nu, rho),
                        get3(psi, xm, mu, nu, rho), g.weight(3, xm));
          }
          acc *= 1.0 / wp;
          out.set(x, lat.comp2(nu, rho), acc);
        }
      }
    }
  }
  return out;
}

double inner_form(const PForm& a, const PForm& b, const ConformalMetric& g) {
  const Lattice& lat = *a.lattice();
  const int p = a.degree();
  // component-major accumulation, the opposite order of the kernel
  double total = 0.0;
  for (int c = 0; c < lat.num_comps(p); ++c) {
    for (std::int64_t x = 0; x < lat.num_sites(); ++x) {
      total += g.weight(p, x) * inner(a.get(x, c), b.get(x, c));
    }
  }
  return total;
}

StressTensor stress_energy(const Connection& D, const ConformalMetric& g,
                           const DensityF& F) {
  const Lattice& lat = *D.lattice();
  const int n = lat.dim();
  const double h = lat.spacing();
  const PForm R = ref::curvature(D);

  StressTensor S(D.lattice());
  for (std::int64_t x = 0; x < lat.num_sites(); ++x) {
    const double q = pointwise_norm2(R, g, x);
    const double frame2 = 1.0 / (g.c(x) * h * h);
    for (int k = 0; k < n; ++k) {
      for (int l = k; l < n; ++l) {
        double mkl = 0.0;
        for (int j = 0; j < n; ++j) {
          mkl += inner(get2(R, x, k, j), get2(R, x, l, j));
        }
        S.set(x, k, l,
              (k == l ? F.value(0.5 * q) : 0.0) -
                  F.deriv(0.5 * q) * frame2 * frame2 * mkl);
      }
    }
  }
  return S;
}

}  // namespace biym::ref
