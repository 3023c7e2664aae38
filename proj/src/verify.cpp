#include "biym/verify.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "biym/conformal.hpp"
#include "biym/functional.hpp"
#include "biym/rng.hpp"

namespace biym {

namespace {

struct Battery {
  const RunConfig& cfg;
  std::vector<IdentityResult> results;

  double tol(const std::string& name, double fallback) const {
    const auto it = cfg.verify_tols.find(name);
    return it == cfg.verify_tols.end() ? fallback : it->second;
  }
  void record(const std::string& name, double resid, double fallback) {
    const double t = tol(name, fallback);
    results.push_back({name, resid, t, resid <= t});
  }
};

double energy_along(const Connection& D, const PForm& B, double t,
                    const ConformalMetric& g, const DensityF& F) {
  Connection Dt = D;
  Dt.alpha.axpy(t, B);
  return energy(Dt, g, F);
}

double rel(double a, double b, double scale) {
  return std::fabs(a - b) / std::max(scale, 1e-30);
}

std::vector<std::shared_ptr<const Lattice>> small_lattices() {
  return {
      Lattice::make(2, {4, 4}, 1.0),
      Lattice::make(3, {3, 3, 3}, 1.0),
      Lattice::make(4, {3, 3, 3, 3}, 1.0),
      Lattice::make(5, {3, 3, 3, 3, 3}, 1.0),
  };
}

void check_adjointness(Battery& b) {
  double worst = 0.0;
  Rng root(b.cfg.verify_seed, "verify.adjointness");
  for (const auto& lat : small_lattices()) {
    for (int m : {2, 3}) {
      for (int metric_case = 0; metric_case < 2; ++metric_case) {
        const ConformalMetric g =
            metric_case == 0
                ? ConformalMetric::uniform(lat)
                : random_metric(lat, root.next_u64(), 0.5);
        for (int p = 0; p <= 2; ++p) {
          if (p + 1 > lat->dim()) continue;
          for (int trial = 0; trial < b.cfg.verify_trials; ++trial) {
            Connection D(
                random_form(lat, 1, m, root.next_u64(), 0.8));
            const PForm phi = random_form(lat, p, m, root.next_u64(), 1.0);
            const PForm psi =
                random_form(lat, p + 1, m, root.next_u64(), 1.0);
            const PForm dphi = d(D, phi);
            const double lhs = inner_form(dphi, psi, g);
            const double rhs = inner_form(phi, delta(D, g, psi), g);
            const double scale =
                norm_form(dphi, g) * norm_form(psi, g) + 1e-30;
            worst = std::max(worst, std::fabs(lhs - rhs) / scale);
          }
        }
      }
    }
  }
  b.record("adjointness", worst, 1e-10);
}

void check_curvature_expansion(Battery& b) {
  double worst = 0.0;
  Rng root(b.cfg.verify_seed, "verify.curvature_expansion");
  for (int n : {2, 3}) {
    const auto lat = Lattice::make(n, std::vector<int>(n, 4), 1.0);
    for (int m : {2, 3}) {
      for (int trial = 0; trial < b.cfg.verify_trials; ++trial) {
        Connection A(random_form(lat, 1, m, root.next_u64(), 1.0));
        const PForm beta = random_form(lat, 1, m, root.next_u64(), 1.0);
        Connection AB = A;
        AB.alpha.axpy(1.0, beta);
        PForm lhs = curvature(AB);
        lhs.axpy(-1.0, curvature(A));
        lhs.axpy(-1.0, d(A, beta));
        PForm wb = wedge_bracket(beta, beta);
        wb.scale(0.5);
        lhs.axpy(-1.0, wb);
        const double scale = curvature(AB).max_abs() + 1.0;
        worst = std::max(worst, lhs.max_abs() / scale);
      }
    }
  }
  b.record("curvature_expansion", worst, 1e-13);
}

void check_first_variation(Battery& b) {
  double worst_pair = 0.0, worst_fd = 0.0;
  Rng root(b.cfg.verify_seed, "verify.first_variation");
  const auto lat = Lattice::make(3, {3, 3, 3}, 1.0);
  for (const DensityF& F : {DensityF::born_infeld(), DensityF::yang_mills()}) {
    for (int m : {2, 3}) {
      const ConformalMetric g = ConformalMetric::uniform(lat);
      for (int trial = 0; trial < b.cfg.verify_trials; ++trial) {
        Connection D(random_form(lat, 1, m, root.next_u64(), 0.5));
        const PForm B = random_form(lat, 1, m, root.next_u64(), 0.5);
        const FirstVariation fv = first_variation(D, B, g, F);
        const double scale = std::fabs(fv.pairing_two_form) +
                             std::fabs(fv.pairing_one_form) + 1e-6;
        worst_pair = std::max(
            worst_pair,
            std::fabs(fv.pairing_two_form - fv.pairing_one_form) / scale);
        const double step = 1e-4;
        const double fd = (energy_along(D, B, step, g, F) -
                           energy_along(D, B, -step, g, F)) /
                          (2.0 * step);
        worst_fd = std::max(
            worst_fd, rel(fd, fv.pairing_one_form,
                          std::max(std::fabs(fd),
                                   std::fabs(fv.pairing_one_form))));
      }
    }
  }
  b.record("first_variation_pair", worst_pair, 1e-12);
  b.record("first_variation_fd", worst_fd, 1e-6);
}

void check_second_variation(Battery& b) {
  double worst_fd = 0.0, worst_cons = 0.0, worst_sym = 0.0;
  Rng root(b.cfg.verify_seed, "verify.second_variation");
  const auto lat = Lattice::make(2, {4, 4}, 1.0);
  const ConformalMetric g = ConformalMetric::uniform(lat);
  for (const DensityF& F : {DensityF::born_infeld(), DensityF::yang_mills()}) {
    for (int m : {2, 3}) {
      for (int trial = 0; trial < b.cfg.verify_trials; ++trial) {
        Connection D(random_form(lat, 1, m, root.next_u64(), 0.4));
        const PForm B = random_form(lat, 1, m, root.next_u64(), 0.5);
        const PForm B2 = random_form(lat, 1, m, root.next_u64(), 0.5);
        const double quad = hess_quadratic(D, B, g, F);
        const double step = 1e-3;
        const double fd = (energy_along(D, B, step, g, F) -
                           2.0 * energy_along(D, B, 0.0, g, F) +
                           energy_along(D, B, -step, g, F)) /
                          (step * step);
        worst_fd = std::max(
            worst_fd,
            rel(fd, quad, std::max(std::fabs(fd), std::fabs(quad))));
        const double pair = inner_form(B, hess_operator(D, B, g, F), g);
        worst_cons = std::max(
            worst_cons,
            rel(pair, quad, 1.0 + std::fabs(pair) + std::fabs(quad)));
        const double s12 = inner_form(B, hess_operator(D, B2, g, F), g);
        const double s21 = inner_form(B2, hess_operator(D, B, g, F), g);
        worst_sym = std::max(
            worst_sym,
            rel(s12, s21, 1.0 + std::fabs(s12) + std::fabs(s21)));
      }
    }
  }
  b.record("second_variation_fd", worst_fd, 1e-5);
  b.record("hess_consistency", worst_cons, 1e-10);
  b.record("hess_symmetry", worst_sym, 1e-10);
}

void check_bracket_identity(Battery& b) {
  double worst = 0.0;
  Rng root(b.cfg.verify_seed, "verify.bracket_identity");
  for (int n : {2, 3, 4}) {
    const auto lat = Lattice::make(n, std::vector<int>(n, 3), 1.0);
    const ConformalMetric g = ConformalMetric::uniform(lat);
    const int m = 3;
    for (int trial = 0; trial < b.cfg.verify_trials; ++trial) {
      Connection D(random_form(lat, 1, m, root.next_u64(), 1.0));
      const PForm B = random_form(lat, 1, m, root.next_u64(), 1.0);
      const PForm R = curvature(D);
      const PForm wb = wedge_bracket(B, B);
      const PForm rb = curvature_operator(D, B, g);
      // pointwise: <[B^B], R>_x = <B, RB>_x
      for (std::int64_t x = 0; x < lat->num_sites(); ++x) {
        double lhs = 0.0;
        for (int c = 0; c < lat->num_comps(2); ++c) {
          lhs += alg::inner(m, wb.at(x, c), R.at(x, c));
        }
        double rhs = 0.0;
        for (int nu = 0; nu < n; ++nu) {
          rhs += alg::inner(m, B.at(x, nu), rb.at(x, nu));
        }
        worst = std::max(worst,
                         rel(lhs, rhs, 1.0 + std::fabs(lhs)));
      }
    }
  }
  b.record("bracket_identity", worst, 1e-12);
}

void check_stress_trace(Battery& b) {
  double worst = 0.0;
  Rng root(b.cfg.verify_seed, "verify.stress_trace");
  for (int n : {2, 3, 4}) {
    const auto lat = Lattice::make(n, std::vector<int>(n, 3), 1.0);
    for (int metric_case = 0; metric_case < 2; ++metric_case) {
      const ConformalMetric g =
          metric_case == 0 ? ConformalMetric::uniform(lat)
                           : random_metric(lat, root.next_u64(), 0.5);
      const DensityF F = DensityF::born_infeld();
      Connection D(random_form(lat, 1, 3, root.next_u64(), 1.0));
      const StressTensor S = stress_energy(D, g, F);
      const PForm R = curvature(D);
      for (std::int64_t x = 0; x < lat->num_sites(); ++x) {
        const double q = pointwise_norm2(R, g, x);
        const double expect =
            n * F.value(0.5 * q) - 2.0 * q * F.deriv(0.5 * q);
        worst = std::max(
            worst, rel(S.trace(x), expect, 1.0 + std::fabs(expect)));
      }
    }
  }
  b.record("stress_trace", worst, 1e-12);
}

void check_metric_variation(Battery& b) {
  double worst_pair = 0.0, worst_fd = 0.0;
  Rng root(b.cfg.verify_seed, "verify.metric_variation");
  const auto lat = Lattice::make(3, {3, 3, 3}, 1.0);
  for (const DensityF& F : {DensityF::born_infeld(), DensityF::yang_mills()}) {
    for (int trial = 0; trial < b.cfg.verify_trials; ++trial) {
      const ConformalMetric g = random_metric(lat, root.next_u64(), 0.4);
      Connection D(random_form(lat, 1, 3, root.next_u64(), 0.7));
      std::vector<double> u(lat->num_sites());
      Rng ur = root.split(trial);
      for (double& v : u) v = ur.next_symmetric(1.0);
      const MetricVariation mv = metric_variation(D, g, F, u);
      worst_pair =
          std::max(worst_pair,
                   rel(mv.stress_pairing, mv.closed_form,
                       1.0 + std::fabs(mv.closed_form)));
      const double step = 1e-5;
      auto energy_scaled = [&](double s) {
        std::vector<double> c(lat->num_sites());
        for (std::int64_t x = 0; x < lat->num_sites(); ++x) {
          c[x] = (1.0 + s * u[x]) * g.c(x);
        }
        return energy(D, ConformalMetric::from_field(lat, std::move(c)), F);
      };
      const double fd =
          (energy_scaled(step) - energy_scaled(-step)) / (2.0 * step);
      worst_fd = std::max(
          worst_fd, rel(fd, mv.closed_form,
                        std::max(std::fabs(fd), std::fabs(mv.closed_form))));
    }
  }
  b.record("metric_variation_pair", worst_pair, 1e-12);
  b.record("metric_variation_fd", worst_fd, 1e-7);
}

void check_conformal_equation(Battery& b) {
  if (b.cfg.verify_conformal == "off") return;
  std::shared_ptr<const Lattice> lat;
  if (b.cfg.verify_conformal == "on") {
    if (b.cfg.n < 5) {
      throw ConfigError(
          "config: the conformal pipeline requires lattice.n >= 5");
    }
    lat = b.cfg.make_lattice();
  } else {
    lat = Lattice::make(5, {3, 3, 3, 3, 3}, 1.0);
  }
  double worst = 0.0;
  Rng root(b.cfg.verify_seed, "verify.conformal");
  const ConformalMetric g = ConformalMetric::uniform(lat);
  for (int m : {2, 3}) {
    Connection D(random_form(lat, 1, m, root.next_u64(), 1.0));
    const SigmaField sf = sigma_field(D, g);
    worst = std::max(worst, sf.max_equation_residual());
    const Step2Report rep = step2_verify(D, g);
    worst = std::max(worst, rep.proportionality_defect);
  }
  b.record("conformal_equation", worst, 1e-10);
}

}  // namespace

std::vector<IdentityResult> run_verify(const RunConfig& cfg) {
  Battery b{cfg, {}};
  check_adjointness(b);
  check_curvature_expansion(b);
  check_first_variation(b);
  check_second_variation(b);
  check_bracket_identity(b);
  check_stress_trace(b);
  check_metric_variation(b);
  check_conformal_equation(b);
  return b.results;
}

std::string format_verify_table(const std::vector<IdentityResult>& results) {
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-24s %14s %12s  %s\n", "identity",
                "max residual", "tolerance", "status");
  out << buf;
  for (const auto& r : results) {
    std::snprintf(buf, sizeof buf, "%-24s %14.3e %12.1e  %s\n",
                  r.name.c_str(), r.max_residual, r.tolerance,
                  r.pass ? "pass" : "FAIL");
    out << buf;
  }
  return out.str();
}

std::string format_verify_csv(const std::vector<IdentityResult>& results) {
  std::ostringstream out;
  out << "identity,max_residual,tolerance,pass\n";
  char buf[160];
  for (const auto& r : results) {
    std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%d\n", r.name.c_str(),
                  r.max_residual, r.tolerance, r.pass ? 1 : 0);
    out << buf;
  }
  return out.str();
}

}  // namespace biym
