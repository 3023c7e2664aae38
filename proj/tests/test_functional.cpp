#include <doctest.h>

#include <cmath>

#include "biym/functional.hpp"
#include "biym/reference.hpp"
#include "biym/rng.hpp"
#include "oracles.hpp"

using namespace biym;

namespace {

// plain Yang-Mills action coded from scratch as the oracle
double naive_ym_action(const Connection& D, const ConformalMetric& g) {
  const Lattice& lat = *D.lattice();
  const PForm R = ref::curvature(D);
  double total = 0.0;
  for (std::int64_t x = 0; x < lat.num_sites(); ++x) {
    total += 0.5 * g.volume(x) * pointwise_norm2(R, g, x);
  }
  return total;
}

}  // namespace

TEST_CASE("density profiles and their derivatives") {
  const DensityF bi = DensityF::born_infeld();
  CHECK(bi.value(0.0) == 0.0);
  CHECK(bi.deriv(0.0) == 1.0);
  CHECK(bi.deriv2(0.0) == -1.0);
  CHECK(bi.value(1.5) == doctest::Approx(1.0).epsilon(1e-15));

  const DensityF ym = DensityF::yang_mills();
  CHECK(ym.value(3.0) == 3.0);
  CHECK(ym.deriv(3.0) == 1.0);
  CHECK(ym.deriv2(3.0) == 0.0);

  const DensityF fp = DensityF::power(4.0);
  CHECK(fp.value(0.0) == 0.5);
  CHECK(fp.value(1.5) == doctest::Approx(0.5 * 4.0).epsilon(1e-15));
  CHECK_THROWS_AS(DensityF::power(2.0), std::invalid_argument);
  CHECK_THROWS_AS(DensityF::from_name("nope"), std::invalid_argument);
}

TEST_CASE("energy: flat Born-Infeld is zero, abelian family is monotone") {
  const auto lat = Lattice::make(3, {3, 4, 3}, 0.9);
  const ConformalMetric g = random_metric(lat, 1, 0.5);
  const DensityF bi = DensityF::born_infeld();
  CHECK(energy(Connection::flat(lat, 2), g, bi) == 0.0);

  const PForm beta = random_form(lat, 1, 2, 2, 1.0);
  auto at = [&](double s) {
    Connection D = Connection::flat(lat, 2);
    D.alpha.axpy(s, beta);
    return energy(D, g, bi);
  };
  CHECK(at(0.0) == 0.0);
  CHECK(at(0.5) > 0.0);
  CHECK(at(1.0) > at(0.5));
  CHECK(at(-0.5) == doctest::Approx(at(0.5)).epsilon(1e-13));
  CHECK(at(-1.0) > at(-0.5));
}

TEST_CASE("Yang-Mills energy matches the independent plain action") {
  const auto lat = Lattice::make(4, {3, 3, 3, 3}, 1.2);
  const ConformalMetric g = random_metric(lat, 3, 0.5);
  const Connection D(random_form(lat, 1, 3, 4, 1.0));
  CHECK(energy(D, g, DensityF::yang_mills()) ==
        doctest::Approx(naive_ym_action(D, g)).epsilon(1e-12));
}

TEST_CASE("el_residual vanishes exactly at the flat connection") {
  const auto lat = Lattice::make(3, {3, 3, 3}, 1.0);
  const ConformalMetric g = random_metric(lat, 5, 0.4);
  for (const DensityF& F :
       {DensityF::born_infeld(), DensityF::yang_mills()}) {
    CHECK(el_residual(Connection::flat(lat, 3), g, F).max_abs() == 0.0);
  }
}

TEST_CASE("el_residual is the exact gradient: pairing vs finite differences") {
  Rng root(99, "test.gradient");
  const auto lat = Lattice::make(3, {3, 3, 3}, 1.0);
  for (const DensityF& F :
       {DensityF::born_infeld(), DensityF::yang_mills()}) {
    for (bool uniform : {true, false}) {
      const ConformalMetric g =
          uniform ? ConformalMetric::uniform(lat)
                  : random_metric(lat, root.next_u64(), 0.4);
      for (int trial = 0; trial < 5; ++trial) {
        const Connection D(random_form(lat, 1, 3, root.next_u64(), 0.5));
        const PForm B = random_form(lat, 1, 3, root.next_u64(), 0.5);
        const double analytic = inner_form(B, el_residual(D, g, F), g);
        const double fd = oracle::fd_first(D, B, g, F, 1e-4);
        CHECK(std::fabs(analytic - fd) <=
              1e-6 * std::max({std::fabs(analytic), std::fabs(fd), 1e-3}));
      }
    }
  }
}

TEST_CASE("YM and BI residuals coincide as the amplitude shrinks") {
  const auto lat = Lattice::make(3, {3, 3, 3}, 1.0);
  const ConformalMetric g = ConformalMetric::uniform(lat);
  const PForm base = random_form(lat, 1, 3, 6, 1.0);
  double prev_gap = 1e300;
  double last_ratio = 1.0;
  for (double s : {1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125}) {
    Connection D = Connection::flat(lat, 3);
    D.alpha.axpy(s, base);
    const PForm rym = el_residual(D, g, DensityF::yang_mills());
    PForm diff = el_residual(D, g, DensityF::born_infeld());
    diff.axpy(-1.0, rym);
    const double gap = norm_form(diff, g) / norm_form(rym, g);
    CHECK(gap < prev_gap);
    last_ratio = gap / prev_gap;
    prev_gap = gap;
  }
  CHECK(prev_gap < 1e-2);
  CHECK(last_ratio < 0.35);  // the relative gap shrinks like s^2
}

TEST_CASE("for the YM density el_residual reduces to delta R") {
  const auto lat = Lattice::make(3, {4, 3, 3}, 0.8);
  const ConformalMetric g = random_metric(lat, 7, 0.5);
  const Connection D(random_form(lat, 1, 3, 8, 1.0));
  const PForm a = el_residual(D, g, DensityF::yang_mills());
  const PForm b = ref::delta(D, g, ref::curvature(D));
  PForm diff = a;
  diff.axpy(-1.0, b);
  CHECK(diff.max_abs() < 1e-12 * (1.0 + a.max_abs()));
}

TEST_CASE("first_variation: zero direction, equal pairings, FD agreement") {
  Rng root(111, "test.first_variation");
  const auto lat = Lattice::make(2, {4, 4}, 1.0);
  const ConformalMetric g = random_metric(lat, root.next_u64(), 0.5);
  const DensityF bi = DensityF::born_infeld();
  const Connection D(random_form(lat, 1, 3, root.next_u64(), 0.7));

  const FirstVariation zero = first_variation(D, PForm(lat, 1, 3), g, bi);
  CHECK(zero.pairing_two_form == 0.0);
  CHECK(zero.pairing_one_form == 0.0);

  for (int trial = 0; trial < 10; ++trial) {
    const PForm B = random_form(lat, 1, 3, root.next_u64(), 1.0);
    const FirstVariation fv = first_variation(D, B, g, bi);
    const double scale =
        std::fabs(fv.pairing_two_form) + std::fabs(fv.pairing_one_form) + 1e-6;
    CHECK(std::fabs(fv.pairing_two_form - fv.pairing_one_form) / scale <
          1e-12);
  }
}

TEST_CASE("curvature_operator: flat and abelian give zero, metric guard") {
  const auto lat = Lattice::make(3, {3, 3, 3}, 1.0);
  const ConformalMetric g = ConformalMetric::uniform(lat);
  const PForm B = random_form(lat, 1, 3, 9, 1.0);
  CHECK(curvature_operator(Connection::flat(lat, 3), B, g).max_abs() == 0.0);

  const PForm Bab = random_form(lat, 1, 2, 10, 1.0);
  const Connection Dab(random_form(lat, 1, 2, 11, 1.0));
  CHECK(curvature_operator(Dab, Bab, g).max_abs() == 0.0);

  const Connection D(random_form(lat, 1, 3, 12, 1.0));
  CHECK_THROWS_AS(curvature_operator(D, B, random_metric(lat, 13, 0.3)),
                  UnsupportedConfig);
}

TEST_CASE("bracket identity: 2-form pairing vs 1-form pairing, pointwise") {
  Rng root(2027, "test.bracket_identity");
  for (int n : {2, 3, 4}) {
    const auto lat = Lattice::make(n, std::vector<int>(n, 3), 1.0);
    const ConformalMetric g = ConformalMetric::uniform(lat);
    const int m = 3;
    for (int trial = 0; trial < 5; ++trial) {
      const Connection D(random_form(lat, 1, m, root.next_u64(), 1.0));
      const PForm B = random_form(lat, 1, m, root.next_u64(), 1.0);
      const PForm R = curvature(D);
      const PForm wb = wedge_bracket(B, B);
      const PForm rb = curvature_operator(D, B, g);
      for (std::int64_t x = 0; x < lat->num_sites(); ++x) {
        double lhs = 0.0;
        for (int c = 0; c < lat->num_comps(2); ++c) {
          lhs += alg::inner(m, wb.at(x, c), R.at(x, c));
        }
        double rhs = 0.0;
        for (int nu = 0; nu < n; ++nu) {
          rhs += alg::inner(m, B.at(x, nu), rb.at(x, nu));
        }
        CHECK(std::fabs(lhs - rhs) <= 1e-12 * (1.0 + std::fabs(lhs)));
      }
      // global: also as inner_form pairings
      const double glhs = inner_form(wb, R, g);
      const double grhs = inner_form(B, rb, g);
      CHECK(std::fabs(glhs - grhs) <= 1e-12 * (1.0 + std::fabs(glhs)));
    }
  }
}

TEST_CASE("bracket identity survives a uniform metric away from h=1") {
  const auto lat = Lattice::make(3, {3, 3, 3}, 0.75);
  const ConformalMetric g = ConformalMetric::uniform(lat, 1.3);
  const Connection D(random_form(lat, 1, 3, 31, 1.0));
  const PForm B = random_form(lat, 1, 3, 32, 1.0);
  const double lhs = inner_form(wedge_bracket(B, B), curvature(D), g);
  const double rhs = inner_form(B, curvature_operator(D, B, g), g);
  CHECK(std::fabs(lhs - rhs) <= 1e-12 * (1.0 + std::fabs(lhs)));
}

TEST_CASE("hess_quadratic: flat stability and the FD oracle") {
  Rng root(500, "test.hess");
  const auto lat = Lattice::make(2, {4, 4}, 1.0);
  const ConformalMetric g = ConformalMetric::uniform(lat);
  const DensityF bi = DensityF::born_infeld();

  // flat connection: the quadratic form is |dB|^2 >= 0
  const Connection flat = Connection::flat(lat, 3);
  for (int trial = 0; trial < 5; ++trial) {
    const PForm B = random_form(lat, 1, 3, root.next_u64(), 1.0);
    const double quad = hess_quadratic(flat, B, g, bi);
    const PForm dB = d(flat, B);
    CHECK(quad == doctest::Approx(inner_form(dB, dB, g)).epsilon(1e-12));
    CHECK(quad >= 0.0);
  }

  for (const DensityF& F :
       {DensityF::born_infeld(), DensityF::yang_mills(),
        DensityF::power(3.0)}) {
    for (int m : {2, 3}) {
      for (int trial = 0; trial < 5; ++trial) {
        const Connection D(random_form(lat, 1, m, root.next_u64(), 0.4));
        const PForm B = random_form(lat, 1, m, root.next_u64(), 0.5);
        const double quad = hess_quadratic(D, B, g, F);
        const double fd = oracle::fd_second(D, B, g, F, 1e-3);
        CHECK(std::fabs(quad - fd) <=
              1e-5 * std::max({std::fabs(quad), std::fabs(fd), 1e-3}));
      }
    }
  }
}

TEST_CASE("hess_quadratic FD check holds for uniform metrics with h != 1") {
  Rng root(511, "test.hess_h");
  const auto lat = Lattice::make(2, {4, 4}, 0.7);
  const ConformalMetric g = ConformalMetric::uniform(lat, 1.4);
  const DensityF bi = DensityF::born_infeld();
  const Connection D(random_form(lat, 1, 3, root.next_u64(), 0.3));
  const PForm B = random_form(lat, 1, 3, root.next_u64(), 0.4);
  const double quad = hess_quadratic(D, B, g, bi);
  const double fd = oracle::fd_second(D, B, g, bi, 1e-3);
  CHECK(std::fabs(quad - fd) <=
        1e-5 * std::max(std::fabs(quad), std::fabs(fd)));
}

TEST_CASE("BI and YM quadratic forms merge as the connection flattens") {
  const auto lat = Lattice::make(2, {4, 4}, 1.0);
  const ConformalMetric g = ConformalMetric::uniform(lat);
  const PForm base = random_form(lat, 1, 3, 600, 1.0);
  const PForm B = random_form(lat, 1, 3, 601, 1.0);
  double prev = 1e300;
  for (double s : {1.0, 0.5, 0.25}) {
    Connection D = Connection::flat(lat, 3);
    D.alpha.axpy(s, base);
    const double gap =
        std::fabs(hess_quadratic(D, B, g, DensityF::yang_mills()) -
                  hess_quadratic(D, B, g, DensityF::born_infeld()));
    CHECK(gap < prev);
    prev = gap;
  }
}

TEST_CASE("hess_operator: flat case, quadratic consistency, symmetry") {
  Rng root(700, "test.hess_op");
  const auto lat = Lattice::make(2, {4, 4}, 1.0);
  const ConformalMetric g = ConformalMetric::uniform(lat);
  const DensityF bi = DensityF::born_infeld();

  // flat: S(B) = delta d B
  const Connection flat = Connection::flat(lat, 3);
  const PForm B0 = random_form(lat, 1, 3, root.next_u64(), 1.0);
  PForm want = delta(flat, g, d(flat, B0));
  PForm got = hess_operator(flat, B0, g, bi);
  got.axpy(-1.0, want);
  CHECK(got.max_abs() < 1e-13 * (1.0 + want.max_abs()));

  for (const DensityF& F :
       {DensityF::born_infeld(), DensityF::power(3.5)}) {
    for (int trial = 0; trial < 5; ++trial) {
      const Connection D(random_form(lat, 1, 3, root.next_u64(), 0.5));
      const PForm B = random_form(lat, 1, 3, root.next_u64(), 0.7);
      const PForm B2 = random_form(lat, 1, 3, root.next_u64(), 0.7);
      const double quad = hess_quadratic(D, B, g, F);
      const double pair = inner_form(B, hess_operator(D, B, g, F), g);
      CHECK(std::fabs(quad - pair) <=
            1e-10 * (1.0 + std::fabs(quad) + std::fabs(pair)));
      const double s12 = inner_form(B, hess_operator(D, B2, g, F), g);
      const double s21 = inner_form(B2, hess_operator(D, B, g, F), g);
      CHECK(std::fabs(s12 - s21) <=
            1e-10 * (1.0 + std::fabs(s12) + std::fabs(s21)));
    }
  }

  CHECK_THROWS_AS(
      hess_operator(flat, B0, random_metric(lat, 3, 0.3), bi),
      UnsupportedConfig);
}

TEST_CASE("metric_variation: zeros, exact pairing, FD oracle") {
  Rng root(800, "test.metric_variation");
  const auto lat = Lattice::make(3, {3, 3, 3}, 1.0);
  const ConformalMetric g = random_metric(lat, root.next_u64(), 0.4);
  const DensityF bi = DensityF::born_infeld();

  const std::vector<double> zero_u(lat->num_sites(), 0.0);
  const Connection D(random_form(lat, 1, 3, root.next_u64(), 0.8));
  const MetricVariation z = metric_variation(D, g, bi, zero_u);
  CHECK(z.stress_pairing == 0.0);
  CHECK(z.closed_form == 0.0);

  // u = 1 at the flat connection: zero for Born-Infeld
  const std::vector<double> one_u(lat->num_sites(), 1.0);
  const MetricVariation f =
      metric_variation(Connection::flat(lat, 3), g, bi, one_u);
  CHECK(f.stress_pairing == 0.0);
  CHECK(f.closed_form == 0.0);

  for (const DensityF& F :
       {DensityF::born_infeld(), DensityF::yang_mills()}) {
    for (int trial = 0; trial < 5; ++trial) {
      const Connection Dr(random_form(lat, 1, 3, root.next_u64(), 0.8));
      std::vector<double> u(lat->num_sites());
      Rng ur = root.split(trial);
      for (double& v : u) v = ur.next_symmetric(1.0);
      const MetricVariation mv = metric_variation(Dr, g, F, u);
      CHECK(std::fabs(mv.stress_pairing - mv.closed_form) <=
            1e-12 * (1.0 + std::fabs(mv.closed_form)));
      const double fd = oracle::fd_metric(Dr, g, F, u, 1e-5);
      CHECK(std::fabs(fd - mv.closed_form) <=
            1e-7 * std::max({std::fabs(fd), std::fabs(mv.closed_form),
                             1e-3}));
    }
  }
}

TEST_CASE("descent property of the exact gradient") {
  const auto lat = Lattice::make(2, {4, 4}, 1.0);
  const ConformalMetric g = ConformalMetric::uniform(lat);
  const DensityF bi = DensityF::born_infeld();
  const Connection D(random_form(lat, 1, 3, 900, 0.8));
  const PForm grad = el_residual(D, g, bi);
  REQUIRE(norm_form(grad, g) > 0.0);
  const double e0 = energy(D, g, bi);
  double t = 1.0;
  bool decreased = false;
  for (int k = 0; k < 60; ++k) {
    Connection Dt = D;
    Dt.alpha.axpy(-t, grad);
    if (energy(Dt, g, bi) < e0) {
      decreased = true;
      break;
    }
    t *= 0.5;
  }
  CHECK(decreased);
}
