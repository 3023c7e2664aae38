#include "biym/functional.hpp"

#include <cmath>

#include "biym/threading.hpp"

namespace biym {

namespace {

std::vector<double> site_density(const Connection& D, const ConformalMetric& g,
                                 const DensityF& F, const PForm& R) {
  const std::int64_t nsites = D.lattice()->num_sites();
  std::vector<double> e(nsites);
#pragma omp parallel for schedule(static) if (nsites > kParallelGrain)
  for (std::int64_t x = 0; x < nsites; ++x) {
    e[x] = g.volume(x) * F.value(0.5 * pointwise_norm2(R, g, x));
  }
  return e;
}

}  // namespace

double energy(const Connection& D, const ConformalMetric& g,
              const DensityF& F) {
  const PForm R = curvature(D);
  const std::vector<double> e = site_density(D, g, F, R);
  double total = 0.0;
  for (double v : e) total += v;
  return total;
}

PForm el_residual(const Connection& D, const ConformalMetric& g,
                  const DensityF& F) {
  PForm R = curvature(D);
  const std::int64_t nsites = D.lattice()->num_sites();
  std::vector<double> s(nsites);
#pragma omp parallel for schedule(static) if (nsites > kParallelGrain)
  for (std::int64_t x = 0; x < nsites; ++x) {
    s[x] = F.deriv(0.5 * pointwise_norm2(R, g, x));
  }
  scale_by_site(R, s);
  return delta(D, g, R);
}

FirstVariation first_variation(const Connection& D, const PForm& B,
                               const ConformalMetric& g, const DensityF& F) {
  check_same_shape(B, D.alpha, "first_variation");
  PForm R = curvature(D);
  const std::int64_t nsites = D.lattice()->num_sites();
  std::vector<double> s(nsites);
  for (std::int64_t x = 0; x < nsites; ++x) {
    s[x] = F.deriv(0.5 * pointwise_norm2(R, g, x));
  }
  PForm sR = R;
  scale_by_site(sR, s);
  const PForm dB = d(D, B);
  FirstVariation out;
  out.pairing_two_form = inner_form(dB, sR, g);
  out.pairing_one_form = inner_form(B, delta(D, g, sR), g);
  return out;
}

PForm curvature_operator(const Connection& D, const PForm& B,
                         const ConformalMetric& g) {
  if (!g.is_uniform()) {
    throw UnsupportedConfig("curvature_operator: requires a uniform metric");
  }
  check_same_shape(B, D.alpha, "curvature_operator");
  const Lattice& lat = *D.lattice();
  const int n = lat.dim();
  const int m = D.fiber_dim();
  const double h = lat.spacing();
  const double frame2 = 1.0 / (g.uniform_value() * h * h);
  const std::int64_t nsites = lat.num_sites();
  const PForm R = curvature(D);

  PForm out(D.lattice(), 1, m);
#pragma omp parallel for schedule(static) if (nsites > kParallelGrain)
  for (std::int64_t x = 0; x < nsites; ++x) {
    for (int nu = 0; nu < n; ++nu) {
      double* o = out.at(x, nu);
      for (int mu = 0; mu < n; ++mu) {
        if (mu == nu) continue;
        const double sgn = mu < nu ? frame2 : -frame2;
        const int c = mu < nu ? lat.comp2(mu, nu) : lat.comp2(nu, mu);
        alg::bracket_acc(m, sgn, R.at(x, c), B.at(x, mu), o);
      }
    }
  }
  return out;
}

namespace {

struct HessParts {
  PForm R;
  PForm dB;
  PForm rb;
  std::vector<double> q;
  std::vector<double> t;  // frame pairing <dB, R>_x
};

HessParts hess_parts(const Connection& D, const PForm& B,
                     const ConformalMetric& g) {
  if (!g.is_uniform()) {
    throw UnsupportedConfig("second variation: requires a uniform metric");
  }
  check_same_shape(B, D.alpha, "second variation");
  const Lattice& lat = *D.lattice();
  const double h = lat.spacing();
  const double frame2sq =
      1.0 / std::pow(g.uniform_value() * h * h, 2.0);
  const int m = D.fiber_dim();
  const int n2 = lat.num_comps(2);
  const std::int64_t nsites = lat.num_sites();

  HessParts parts{curvature(D), d(D, B), curvature_operator(D, B, g), {}, {}};
  parts.q = pointwise_norm2_field(parts.R, g);
  parts.t.resize(nsites);
#pragma omp parallel for schedule(static) if (nsites > kParallelGrain)
  for (std::int64_t x = 0; x < nsites; ++x) {
    double acc = 0.0;
    for (int c = 0; c < n2; ++c) {
      acc += alg::inner(m, parts.dB.at(x, c), parts.R.at(x, c));
    }
    parts.t[x] = frame2sq * acc;
  }
  return parts;
}

}  // namespace

double hess_quadratic(const Connection& D, const PForm& B,
                      const ConformalMetric& g, const DensityF& F) {
  const HessParts parts = hess_parts(D, B, g);
  const Lattice& lat = *D.lattice();
  const double h = lat.spacing();
  const double u = g.uniform_value();
  const double frame2sq = 1.0 / std::pow(u * h * h, 2.0);
  const double frame1 = 1.0 / (u * h * h);
  const int m = D.fiber_dim();
  const int n = lat.dim();
  const int n2 = lat.num_comps(2);
  const std::int64_t nsites = lat.num_sites();

  std::vector<double> partial(nsites);
#pragma omp parallel for schedule(static) if (nsites > kParallelGrain)
  for (std::int64_t x = 0; x < nsites; ++x) {
    double dbdb = 0.0;
    for (int c = 0; c < n2; ++c) {
      dbdb += alg::inner(m, parts.dB.at(x, c), parts.dB.at(x, c));
    }
    dbdb *= frame2sq;
    double brb = 0.0;
    for (int nu = 0; nu < n; ++nu) {
      brb += alg::inner(m, B.at(x, nu), parts.rb.at(x, nu));
    }
    brb *= frame1;
    const double th = 0.5 * parts.q[x];
    partial[x] = g.volume(x) * (F.deriv2(th) * parts.t[x] * parts.t[x] +
                                F.deriv(th) * (dbdb + brb));
  }
  double total = 0.0;
  for (std::int64_t x = 0; x < nsites; ++x) total += partial[x];
  return total;
}

PForm hess_operator(const Connection& D, const PForm& B,
                    const ConformalMetric& g, const DensityF& F) {
  HessParts parts = hess_parts(D, B, g);
  const std::int64_t nsites = D.lattice()->num_sites();

  // argument of the coderivative: F' dB + F'' <dB, R>_x R
  std::vector<double> s1(nsites), s2(nsites), s3(nsites);
  for (std::int64_t x = 0; x < nsites; ++x) {
    const double th = 0.5 * parts.q[x];
    s1[x] = F.deriv(th);
    s2[x] = F.deriv2(th) * parts.t[x];
    s3[x] = s1[x];
  }
  PForm arg = parts.dB;
  scale_by_site(arg, s1);
  PForm r2 = parts.R;
  scale_by_site(r2, s2);
  arg.axpy(1.0, r2);

  PForm out = delta(D, g, arg);
  scale_by_site(parts.rb, s3);
  out.axpy(1.0, parts.rb);
  return out;
}

MetricVariation metric_variation(const Connection& D, const ConformalMetric& g,
                                 const DensityF& F,
                                 const std::vector<double>& u) {
  const Lattice& lat = *D.lattice();
  const std::int64_t nsites = lat.num_sites();
  if (static_cast<std::int64_t>(u.size()) != nsites) {
    throw std::invalid_argument("metric_variation: field size mismatch");
  }
  const int n = lat.dim();
  const PForm R = curvature(D);
  const StressTensor S = stress_energy(D, g, F);

  MetricVariation out{0.0, 0.0};
  for (std::int64_t x = 0; x < nsites; ++x) {
    const double vol = g.volume(x);
    const double q = pointwise_norm2(R, g, x);
    out.stress_pairing += 0.5 * u[x] * S.trace(x) * vol;
    out.closed_form +=
        vol * u[x] * (0.5 * n * F.value(0.5 * q) - q * F.deriv(0.5 * q));
  }
  return out;
}

std::vector<double> flatten_one_form(const PForm& B) {
  const Lattice& lat = *B.lattice();
  const int n = lat.dim();
  const int m = B.fiber_dim();
  const int gdim = so_dim(m);
  std::vector<double> x(static_cast<std::size_t>(lat.num_sites()) * n * gdim);
  std::size_t idx = 0;
  for (std::int64_t s = 0; s < lat.num_sites(); ++s) {
    for (int mu = 0; mu < n; ++mu) {
      const double* v = B.at(s, mu);
      for (int a = 0; a < gdim; ++a) {
        const auto [i, j] = so_pair(m, a);
        x[idx++] = v[i * m + j];
      }
    }
  }
  return x;
}

PForm unflatten_one_form(const std::vector<double>& x,
                         std::shared_ptr<const Lattice> lat, int m) {
  const int n = lat->dim();
  const int gdim = so_dim(m);
  PForm B(lat, 1, m);
  std::size_t idx = 0;
  for (std::int64_t s = 0; s < lat->num_sites(); ++s) {
    for (int mu = 0; mu < n; ++mu) {
      double* v = B.at(s, mu);
      for (int a = 0; a < gdim; ++a) {
        const auto [i, j] = so_pair(m, a);
        v[i * m + j] = x[idx];
        v[j * m + i] = -x[idx];
        ++idx;
      }
    }
  }
  return B;
}

}  // namespace biym
