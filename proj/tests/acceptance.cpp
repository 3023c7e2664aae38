// Acceptance suite: every criterion is checked against an independent
// oracle at its stated tolerance and prints exactly one pass/fail line.

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "biym/conformal.hpp"
#include "biym/flow.hpp"
#include "biym/functional.hpp"
#include "biym/snapshot.hpp"
#include "biym/verify.hpp"
#include "oracles.hpp"

using namespace biym;

namespace {

int g_failures = 0;

void report(int num, const char* name, bool pass, const std::string& detail) {
  std::printf("%s  criterion %2d  %-28s %s\n", pass ? "PASS" : "FAIL", num,
              name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// ---- 1: adjointness -----------------------------------------------------

void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  Rng root(515, "acceptance.adjointness");
  for (int n : {2, 3, 4, 5}) {
    const auto lat =
        Lattice::make(n, std::vector<int>(n, n <= 3 ? 4 : 3), 1.0);
    for (int m : {2, 3}) {
      for (bool uniform : {true, false}) {
        const ConformalMetric g =
            uniform ? ConformalMetric::uniform(lat)
                    : random_metric(lat, root.next_u64(), 0.5);
        for (int p = 0; p <= 2; ++p) {
          if (p + 1 > n) continue;
          for (int trial = 0; trial < 20; ++trial) {
            const Connection D(random_form(lat, 1, m, root.next_u64(), 0.8));
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
  const double dt = seconds_since(t0);
  report(1, "adjointness", worst <= 1e-10 && dt < 30.0,
         fmt("max rel residual %.2e (tol 1e-10), %.1f s (budget 30 s)",
             worst, dt));
}

// ---- 2: first variation -------------------------------------------------

void criterion_2() {
  double worst_fd = 0.0, worst_pair = 0.0;
  Rng root(516, "acceptance.first_variation");
  const auto lat = Lattice::make(3, {3, 3, 3}, 1.0);
  for (const DensityF& F : {DensityF::born_infeld(), DensityF::yang_mills()}) {
    for (int m : {2, 3}) {
      for (int trial = 0; trial < 20; ++trial) {
        const ConformalMetric g =
            trial % 2 == 0 ? ConformalMetric::uniform(lat)
                           : random_metric(lat, root.next_u64(), 0.4);
        const Connection D(random_form(lat, 1, m, root.next_u64(), 0.5));
        const PForm B = random_form(lat, 1, m, root.next_u64(), 0.5);
        const FirstVariation fv = first_variation(D, B, g, F);
        const double pscale = std::fabs(fv.pairing_two_form) +
                              std::fabs(fv.pairing_one_form) + 1e-6;
        worst_pair = std::max(
            worst_pair,
            std::fabs(fv.pairing_two_form - fv.pairing_one_form) / pscale);
        const double fd = oracle::fd_first(D, B, g, F, 1e-4);
        worst_fd = std::max(
            worst_fd,
            std::fabs(fd - fv.pairing_one_form) /
                std::max({std::fabs(fd), std::fabs(fv.pairing_one_form),
                          1e-3}));
      }
    }
  }
  report(2, "first variation", worst_fd <= 1e-6 && worst_pair <= 1e-12,
         fmt("FD gap %.2e (tol 1e-6), pairing gap %.2e (tol 1e-12)",
             worst_fd, worst_pair));
}

// ---- 3: second variation ------------------------------------------------

void criterion_3() {
  double worst_fd = 0.0, worst_cons = 0.0, worst_sym = 0.0;
  Rng root(517, "acceptance.second_variation");
  const auto lat = Lattice::make(2, {4, 4}, 1.0);
  const ConformalMetric g = ConformalMetric::uniform(lat);
  for (const DensityF& F : {DensityF::born_infeld(), DensityF::yang_mills()}) {
    for (int m : {2, 3}) {
      for (int trial = 0; trial < 20; ++trial) {
        const Connection D(random_form(lat, 1, m, root.next_u64(), 0.4));
        const PForm B = random_form(lat, 1, m, root.next_u64(), 0.5);
        const PForm B2 = random_form(lat, 1, m, root.next_u64(), 0.5);
        const double quad = hess_quadratic(D, B, g, F);
        const double fd = oracle::fd_second(D, B, g, F, 1e-3);
        worst_fd = std::max(
            worst_fd, std::fabs(quad - fd) /
                          std::max({std::fabs(quad), std::fabs(fd), 1e-3}));
        const double pair = inner_form(B, hess_operator(D, B, g, F), g);
        worst_cons =
            std::max(worst_cons,
                     std::fabs(quad - pair) /
                         (1.0 + std::fabs(quad) + std::fabs(pair)));
        const double s12 = inner_form(B, hess_operator(D, B2, g, F), g);
        const double s21 = inner_form(B2, hess_operator(D, B, g, F), g);
        worst_sym = std::max(worst_sym,
                             std::fabs(s12 - s21) /
                                 (1.0 + std::fabs(s12) + std::fabs(s21)));
      }
    }
  }
  report(3, "second variation",
         worst_fd <= 1e-5 && worst_cons <= 1e-10 && worst_sym <= 1e-10,
         fmt("FD %.2e (1e-5), operator %.2e (1e-10), symmetry %.2e (1e-10)",
             worst_fd, worst_cons, worst_sym));
}

// ---- 4: bracket identity ------------------------------------------------

void criterion_4() {
  double worst = 0.0;
  Rng root(518, "acceptance.bracket");
  for (int n : {2, 3, 4}) {
    const auto lat = Lattice::make(n, std::vector<int>(n, 3), 1.0);
    const ConformalMetric g = ConformalMetric::uniform(lat);
    const int m = 3;
    for (int trial = 0; trial < 10; ++trial) {
      const Connection D(random_form(lat, 1, m, root.next_u64(), 1.0));
      const PForm B = random_form(lat, 1, m, root.next_u64(), 1.0);
      const PForm R = curvature(D);
      const PForm wb = wedge_bracket(B, B);
      const PForm rb = curvature_operator(D, B, g);
      for (std::int64_t x = 0; x < lat->num_sites(); ++x) {
        double lhs = 0.0, rhs = 0.0;
        for (int c = 0; c < lat->num_comps(2); ++c) {
          lhs += alg::inner(m, wb.at(x, c), R.at(x, c));
        }
        for (int nu = 0; nu < n; ++nu) {
          rhs += alg::inner(m, B.at(x, nu), rb.at(x, nu));
        }
        worst =
            std::max(worst, std::fabs(lhs - rhs) / (1.0 + std::fabs(lhs)));
      }
    }
  }
  report(4, "bracket identity", worst <= 1e-12,
         fmt("max sitewise defect %.2e (tol 1e-12)", worst));
}

// ---- 5: metric variation ------------------------------------------------

void criterion_5() {
  double worst_fd = 0.0, worst_trace = 0.0;
  Rng root(519, "acceptance.metric_variation");
  const auto lat = Lattice::make(3, {3, 3, 3}, 1.0);
  const DensityF bi = DensityF::born_infeld();
  for (int trial = 0; trial < 20; ++trial) {
    const ConformalMetric g = random_metric(lat, root.next_u64(), 0.4);
    const Connection D(random_form(lat, 1, 3, root.next_u64(), 0.7));
    std::vector<double> u(lat->num_sites());
    Rng ur = root.split(trial);
    for (double& v : u) v = ur.next_symmetric(1.0);
    const MetricVariation mv = metric_variation(D, g, bi, u);
    const double fd = oracle::fd_metric(D, g, bi, u, 1e-5);
    worst_fd = std::max(
        worst_fd,
        std::fabs(fd - mv.stress_pairing) /
            std::max({std::fabs(fd), std::fabs(mv.stress_pairing), 1e-3}));

    const StressTensor S = stress_energy(D, g, bi);
    const PForm R = curvature(D);
    for (std::int64_t x = 0; x < lat->num_sites(); ++x) {
      const double q = pointwise_norm2(R, g, x);
      const double expect =
          3.0 * bi.value(0.5 * q) - 2.0 * q * bi.deriv(0.5 * q);
      worst_trace =
          std::max(worst_trace, std::fabs(S.trace(x) - expect) /
                                    (1.0 + std::fabs(expect)));
    }
  }
  report(5, "metric variation", worst_fd <= 1e-7 && worst_trace <= 1e-12,
         fmt("FD gap %.2e (tol 1e-7), trace identity %.2e (tol 1e-12)",
             worst_fd, worst_trace));
}

// ---- 6: conservation law as a convergence statement ---------------------

void criterion_6() {
  bool pass = true;
  std::string detail;

  // divergence formula vs direct divergence under refinement, n = 2
  for (int m : {2, 3}) {
    const oracle::SmoothField field(2, m, 80, 0.3);
    std::vector<double> hs, gaps;
    for (int L : {8, 16, 32}) {
      const Connection D = oracle::sample_smooth_connection(field, 2, m, L);
      const ConformalMetric g = ConformalMetric::uniform(D.lattice());
      const StressTensor S =
          stress_energy(D, g, DensityF::born_infeld());
      const CovectorField direct = div_direct(S, g);
      const DivFormula formula = div_formula(D, g);
      CovectorField diff = direct;
      for (std::size_t i = 0; i < diff.v.size(); ++i) {
        diff.v[i] -= formula.total.v[i];
      }
      hs.push_back(1.0 / L);
      gaps.push_back(diff.l2_norm());
    }
    const double slope = oracle::loglog_slope(hs, gaps);
    pass = pass && slope >= 0.9;
    detail += fmt("div slope m=%d %.2f; ", m, slope);
  }

  // Bianchi residual under refinement; no 3-cells exist at n = 2, so the
  // study runs at n = 3 (abelian case is identically zero)
  {
    const oracle::SmoothField field(3, 3, 78, 0.3);
    std::vector<double> hs, resid;
    for (int L : {8, 16, 32}) {
      const Connection D = oracle::sample_smooth_connection(field, 3, 3, L);
      const ConformalMetric g = ConformalMetric::uniform(D.lattice());
      hs.push_back(1.0 / L);
      resid.push_back(norm_form(d(D, curvature(D)), g));
    }
    const double slope = oracle::loglog_slope(hs, resid);
    pass = pass && slope >= 0.9;
    detail += fmt("bianchi slope (n=3) %.2f; ", slope);

    const oracle::SmoothField fab(3, 2, 78, 0.3);
    const Connection Dab = oracle::sample_smooth_connection(fab, 3, 2, 16);
    const double ab = d(Dab, curvature(Dab)).max_abs();
    pass = pass && ab <= 1e-13;
    detail += fmt("abelian bianchi %.1e; ", ab);
  }

  // at a flowed critical point the coderivative term collapses
  for (int m : {2, 3}) {
    const auto lat = Lattice::make(2, {8, 8}, 1.0);
    const ConformalMetric g = ConformalMetric::uniform(lat);
    FlowConfig cfg;
    cfg.residual_tol = 1e-8;
    cfg.newton_tail = true;
    const FlowResult res = minimize(random_connection(lat, m, 5, 0.3), g,
                                    DensityF::born_infeld(), cfg);
    const bool conv = res.status == FlowStatus::Converged;
    const DivFormula formula = div_formula(res.connection, g);
    const double term = formula.coderivative_term.l2_norm();
    pass = pass && conv && term <= 1e-7;
    detail += fmt("critical delta-term m=%d %.1e", m, term);
    if (m == 2) detail += "; ";
  }

  report(6, "conservation (convergence)", pass, detail);
}

// ---- 7: the sigma field functional equation -----------------------------

void criterion_7() {
  double worst_eq = 0.0, worst_quartic = 0.0;
  Rng root(520, "acceptance.sigma");
  for (int n : {5, 6}) {
    const auto lat = Lattice::make(n, std::vector<int>(n, 3), 1.0);
    const ConformalMetric g = ConformalMetric::uniform(lat);
    for (int m : {2, 3}) {
      const Connection D(random_form(lat, 1, m, root.next_u64(), 1.0));
      const SigmaField sf = sigma_field(D, g);
      worst_eq = std::max(worst_eq, sf.max_equation_residual());
      if (n == 6) {
        // closed-form quartic root: 2 t s^4 + s^2 - 1 = 0
        const PForm R = curvature(D);
        for (std::int64_t x = 0; x < lat->num_sites(); ++x) {
          const double t = 0.5 * pointwise_norm2(R, g, x);
          if (t <= 0.0) continue;
          const double s2 = (-1.0 + std::sqrt(1.0 + 8.0 * t)) / (4.0 * t);
          worst_quartic = std::max(
              worst_quartic, std::fabs(sf.at(x) - std::sqrt(s2)));
        }
      }
    }
  }
  report(7, "sigma functional equation",
         worst_eq <= 1e-10 && worst_quartic <= 1e-10,
         fmt("equation residual %.2e (1e-10), quartic gap %.2e (1e-10)",
             worst_eq, worst_quartic));
}

// ---- 8: the end-to-end rescaling pipeline -------------------------------

void criterion_8() {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = true;
  std::string detail;
  const auto lat = Lattice::make(5, {3, 3, 3, 3, 3}, 1.0);
  const ConformalMetric g = ConformalMetric::uniform(lat);
  for (int m : {2, 3}) {
    FlowConfig cfg;
    cfg.residual_tol = 1e-8;
    cfg.newton_tail = true;  // the non-abelian tail is quartically flat
    const FlowResult res = minimize(random_connection(lat, m, 21, 0.3), g,
                                    DensityF::yang_mills(), cfg);
    if (res.status != FlowStatus::Converged) {
      pass = false;
      detail += fmt("m=%d flow did not converge; ", m);
      continue;
    }
    const Step2Report rep = step2_verify(res.connection, g);
    const bool ok = rep.r_ym_norm <= 1e-8 &&
                    rep.r_bi_norm <= rep.max_sigma_pow * 1e-8 &&
                    rep.proportionality_defect <= 1e-10;
    pass = pass && ok;
    detail += fmt("m=%d: r_ym %.1e, r_bi %.1e (cap %.1e), defect %.1e; ", m,
                  rep.r_ym_norm, rep.r_bi_norm, rep.max_sigma_pow * 1e-8,
                  rep.proportionality_defect);
  }
  const double dt = seconds_since(t0);
  pass = pass && dt <= 600.0;
  detail += fmt("%.0f s (budget 600)", dt);
  report(8, "rescaling pipeline (3^5)", pass, detail);
}

// ---- 9: spectrum sanity at the flat connection --------------------------

void criterion_9() {
  const int L = 8;
  const auto lat = Lattice::make(2, {L, L}, 1.0);
  const ConformalMetric g = ConformalMetric::uniform(lat);
  const Connection flat = Connection::flat(lat, 2);
  const DensityF bi = DensityF::born_infeld();

  const SpectrumResult res = spectrum(flat, g, bi, L * L * 2, 0.0);
  double smallest = 0.0;
  for (double v : res.eigenvalues) {
    if (v > res.tau) {
      smallest = v;
      break;
    }
  }
  const double pi = 3.14159265358979323846;
  const double want = 4.0 * std::sin(pi / L) * std::sin(pi / L);

  double kernel_defect = 0.0;
  for (int mu = 0; mu < 2; ++mu) {
    PForm B(lat, 1, 2);
    for (std::int64_t x = 0; x < lat->num_sites(); ++x) {
      B.set(x, mu, so_generator(2, 0));
    }
    kernel_defect =
        std::max(kernel_defect, norm_form(hess_operator(flat, B, g, bi), g));
  }

  const bool pass = std::fabs(smallest - want) <= 1e-10 && res.index == 0 &&
                    kernel_defect <= 1e-12;
  report(9, "flat spectrum (Fourier)", pass,
         fmt("lowest nonzero %.12f vs %.12f, index %d, kernel %.1e",
             smallest, want, res.index, kernel_defect));
}

// ---- 10: infrastructure -------------------------------------------------

void criterion_10() {
  namespace fs = std::filesystem;
  bool pass = true;
  std::string detail;

  // snapshot round trip byte-identity
  const auto lat = Lattice::make(3, {3, 4, 3}, 0.9);
  const Connection D = random_connection(lat, 3, 33, 0.8);
  const auto bytes = encode_snapshot(D, "bi");
  const DecodedSnapshot back = decode_snapshot(bytes);
  const bool roundtrip =
      encode_snapshot(back.connection, back.density_name) == bytes;
  pass = pass && roundtrip;
  detail += fmt("roundtrip %s; ", roundtrip ? "ok" : "BAD");

  auto corrupted = bytes;
  corrupted[corrupted.size() / 2] ^= 0x01;
  bool rejected = false;
  try {
    decode_snapshot(corrupted);
  } catch (const std::exception&) {
    rejected = true;
  }
  pass = pass && rejected;
  detail += fmt("bit-flip rejected %s; ", rejected ? "ok" : "BAD");

  // seeded runs are bitwise reproducible
  {
    const auto lat2 = Lattice::make(2, {5, 5}, 1.0);
    const ConformalMetric g = ConformalMetric::uniform(lat2);
    FlowConfig cfg;
    cfg.residual_tol = 1e-7;
    const FlowResult a = minimize(random_connection(lat2, 3, 44, 0.5), g,
                                  DensityF::born_infeld(), cfg);
    const FlowResult b = minimize(random_connection(lat2, 3, 44, 0.5), g,
                                  DensityF::born_infeld(), cfg);
    bool same = a.trace.size() == b.trace.size();
    for (std::size_t i = 0; same && i < a.trace.size(); ++i) {
      same = a.trace[i].energy == b.trace[i].energy &&
             a.trace[i].residual == b.trace[i].residual &&
             a.trace[i].step == b.trace[i].step;
    }
    same = same && encode_snapshot(a.connection, "bi") ==
                       encode_snapshot(b.connection, "bi");
    pass = pass && same;
    detail += fmt("seeded rerun bitwise %s; ", same ? "ok" : "BAD");
  }

  // the verify command exits 0 on a clean build
  {
    const fs::path dir =
        fs::temp_directory_path() / "biym_acceptance_verify";
    fs::create_directories(dir);
    const fs::path cfg_path = dir / "default.cfg";
    {
      std::ofstream out(cfg_path);
      out << "verify.trials = 20\nverify.seed = 2026\n";
    }
    const std::string cmd = std::string(BIYM_CLI_PATH) + " verify --config " +
                            cfg_path.string() + " --out " + dir.string() +
                            " --quiet > /dev/null 2> /dev/null";
    const int rc = WEXITSTATUS(std::system(cmd.c_str()));
    pass = pass && rc == 0;
    detail += fmt("verify exit %d", rc);
    fs::remove_all(dir);
  }

  report(10, "infrastructure", pass, detail);
}

}  // namespace

int main() {
  std::printf("acceptance suite\n================\n");
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  if (g_failures == 0) {
    std::printf("\nall criteria passed\n");
  } else {
    std::printf("\n%d criterion(s) FAILED\n", g_failures);
  }
  return g_failures == 0 ? 0 : 1;
}
