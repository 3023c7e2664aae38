#include <doctest.h>

#include <cmath>

#include "biym/functional.hpp"
#include "oracles.hpp"

using namespace biym;

TEST_CASE("flat abelian spectrum matches the Fourier oracle") {
  const int L = 8;
  const auto lat = Lattice::make(2, {L, L}, 1.0);
  const ConformalMetric g = ConformalMetric::uniform(lat);
  const Connection flat = Connection::flat(lat, 2);
  const DensityF bi = DensityF::born_infeld();

  const int dim = L * L * 2;
  const SpectrumResult res = spectrum(flat, g, bi, dim, 0.0);
  REQUIRE(res.method == "dense");
  REQUIRE(static_cast<int>(res.eigenvalues.size()) == dim);

  const std::vector<double> expect = oracle::flat_spectrum_2d(L, 1.0);
  REQUIRE(static_cast<int>(expect.size()) == dim);
  for (int i = 0; i < dim; ++i) {
    CHECK(std::fabs(res.eigenvalues[i] - expect[i]) < 1e-10);
  }

  // smallest nonzero eigenvalue is 4 sin^2(pi/8)
  const double pi = 3.14159265358979323846;
  const double want = 4.0 * std::sin(pi / L) * std::sin(pi / L);
  double smallest = 0.0;
  for (double v : res.eigenvalues) {
    if (v > res.tau) {
      smallest = v;
      break;
    }
  }
  CHECK(std::fabs(smallest - want) < 1e-10);

  CHECK(res.index == 0);

  // kernel count: gauge directions (N-1 per generator) plus the two
  // constant forms and the k=0 gauge zero -> 65 for L=8
  CHECK(res.nullity == L * L + 1);
  CHECK(res.gauge_rank == L * L - 1);
}

TEST_CASE("flat abelian dispersion under the weighted pairing, h != 1") {
  // delta carries the extra 1/(c h^2) pairing factor, so the flat
  // Laplacian dispersion is 4 sin^2(pi k / L) / (c h^4); at h = c = 1
  // this is the plain Fourier formula.
  const int L = 6;
  const double h = 0.5;
  const auto lat = Lattice::make(2, {L, L}, h);
  const ConformalMetric g = ConformalMetric::uniform(lat);
  const SpectrumResult res = spectrum(Connection::flat(lat, 2), g,
                                      DensityF::born_infeld(), 2 * L * L,
                                      0.0);
  double smallest = 0.0;
  for (double v : res.eigenvalues) {
    if (v > res.tau) {
      smallest = v;
      break;
    }
  }
  const double pi = 3.14159265358979323846;
  const double want =
      4.0 * std::sin(pi / L) * std::sin(pi / L) / (h * h * h * h);
  CHECK(std::fabs(smallest - want) < 1e-10);
}

TEST_CASE("constant 1-forms are annihilated at the flat connection") {
  const auto lat = Lattice::make(2, {8, 8}, 1.0);
  const ConformalMetric g = ConformalMetric::uniform(lat);
  const Connection flat = Connection::flat(lat, 2);
  const DensityF bi = DensityF::born_infeld();
  for (int mu = 0; mu < 2; ++mu) {
    PForm B(lat, 1, 2);
    const AlgebraElement gen = so_generator(2, 0);
    for (std::int64_t x = 0; x < lat->num_sites(); ++x) B.set(x, mu, gen);
    const PForm SB = hess_operator(flat, B, g, bi);
    CHECK(norm_form(SB, g) <= 1e-12);
  }
}

TEST_CASE("nullity at the flat connection is at least n * dim so(m)") {
  const auto lat = Lattice::make(3, {3, 3, 3}, 1.0);
  const ConformalMetric g = ConformalMetric::uniform(lat);
  const Connection flat = Connection::flat(lat, 3);
  const SpectrumResult res =
      spectrum(flat, g, DensityF::born_infeld(), 40, 0.0);
  CHECK(res.nullity >= 3 * so_dim(3));
  CHECK(res.index == 0);
}

TEST_CASE("lanczos path agrees with the dense path on the low end") {
  const auto lat = Lattice::make(2, {4, 4}, 1.0);
  const ConformalMetric g = ConformalMetric::uniform(lat);
  const DensityF bi = DensityF::born_infeld();
  const Connection D(random_form(lat, 1, 2, 1234, 0.6));

  const int k = 6;
  const SpectrumResult dense = spectrum(D, g, bi, k, 0.0);
  SpectrumOptions opts;
  opts.force_iterative = true;
  opts.want_gauge_rank = false;
  const SpectrumResult lanczos = spectrum(D, g, bi, k, 0.0, opts);
  REQUIRE(lanczos.method == "lanczos");
  CHECK(lanczos.converged);
  REQUIRE(lanczos.eigenvalues.size() >= 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::fabs(lanczos.eigenvalues[i] - dense.eigenvalues[i]) < 1e-7);
  }
}

TEST_CASE("a starved lanczos run reports non-convergence with residuals") {
  const auto lat = Lattice::make(2, {5, 5}, 1.0);
  const ConformalMetric g = ConformalMetric::uniform(lat);
  const Connection D(random_form(lat, 1, 3, 55, 0.7));
  SpectrumOptions opts;
  opts.force_iterative = true;
  opts.max_lanczos = 8;  // far too few steps for dim 150
  opts.want_gauge_rank = false;
  const SpectrumResult res =
      spectrum(D, g, DensityF::born_infeld(), 10, 0.0, opts);
  CHECK_FALSE(res.converged);
  CHECK(res.max_residual > 0.0);
}

TEST_CASE("spectrum rejects non-uniform metrics and bad k") {
  const auto lat = Lattice::make(2, {4, 4}, 1.0);
  const Connection flat = Connection::flat(lat, 2);
  const DensityF bi = DensityF::born_infeld();
  CHECK_THROWS_AS(spectrum(flat, random_metric(lat, 1, 0.3), bi, 4, 0.0),
                  UnsupportedConfig);
  CHECK_THROWS_AS(spectrum(flat, ConformalMetric::uniform(lat), bi, 0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("eigenvalues come out ascending with the requested count") {
  const auto lat = Lattice::make(2, {4, 4}, 1.0);
  const ConformalMetric g = ConformalMetric::uniform(lat);
  const Connection D(random_form(lat, 1, 3, 77, 0.5));
  const int k = 9;
  const SpectrumResult res = spectrum(D, g, DensityF::born_infeld(), k, 0.0);
  REQUIRE(static_cast<int>(res.eigenvalues.size()) == k);
  for (int i = 1; i < k; ++i) {
    CHECK(res.eigenvalues[i] >= res.eigenvalues[i - 1]);
  }
}
