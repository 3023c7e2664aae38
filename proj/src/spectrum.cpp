#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "biym/functional.hpp"
#include "biym/rng.hpp"

namespace biym {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double nrm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

void axpy(double s, const std::vector<double>& x, std::vector<double>& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += s * x[i];
}

// Rank of the space spanned by d applied to the 0-form basis: the
// near-null gauge directions at D.
int compute_gauge_rank(const Connection& D) {
  const auto lat = D.lattice();
  const int m = D.fiber_dim();
  const int gdim = so_dim(m);
  const std::int64_t n0 = lat->num_sites() * gdim;

  std::vector<std::vector<double>> basis;
  int rank = 0;
  for (std::int64_t i = 0; i < n0; ++i) {
    PForm s0(lat, 0, m);
    const std::int64_t site = i / gdim;
    s0.set(site, 0, so_generator(m, static_cast<int>(i % gdim)));
    std::vector<double> v = flatten_one_form(d(D, s0));
    const double scale = nrm(v);
    if (scale < 1e-14) continue;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) axpy(-dot(v, b), b, v);
    }
    const double rem = nrm(v);
    if (rem > 1e-10 * scale) {
      for (double& x : v) x /= rem;
      basis.push_back(std::move(v));
      ++rank;
    }
  }
  return rank;
}

}  // namespace

SpectrumResult spectrum(const Connection& D, const ConformalMetric& g,
                        const DensityF& F, int k, double tau,
                        const SpectrumOptions& opts) {
  if (!g.is_uniform()) {
    throw UnsupportedConfig("spectrum: requires a uniform metric");
  }
  if (k < 1) throw std::invalid_argument("spectrum: k must be >= 1");
  const auto lat = D.lattice();
  const int m = D.fiber_dim();
  const int gdim = so_dim(m);
  const std::int64_t dim = lat->num_sites() * lat->dim() * gdim;
  if (dim == 0) throw std::invalid_argument("spectrum: trivial fiber");

  auto apply = [&](const std::vector<double>& x) {
    const PForm B = unflatten_one_form(x, lat, m);
    return flatten_one_form(hess_operator(D, B, g, F));
  };

  SpectrumResult res;
  res.dim = dim;

  std::vector<double> all;
  if (dim <= opts.dense_limit && !opts.force_iterative) {
    res.method = "dense";
    Eigen::MatrixXd A(dim, dim);
    std::vector<double> e(dim, 0.0);
    for (std::int64_t j = 0; j < dim; ++j) {
      e[j] = 1.0;
      const std::vector<double> col = apply(e);
      e[j] = 0.0;
      for (std::int64_t i = 0; i < dim; ++i) A(i, j) = col[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A);
    if (solver.info() != Eigen::Success) {
      throw NoConvergence("spectrum: dense eigensolver failed");
    }
    all.assign(solver.eigenvalues().data(),
               solver.eigenvalues().data() + dim);
    res.converged = true;
  } else {
    res.method = "lanczos";
    const int want = static_cast<int>(std::min<std::int64_t>(k, dim));
    const int maxsteps = static_cast<int>(
        opts.max_lanczos > 0
            ? std::min<std::int64_t>(opts.max_lanczos, dim)
            : std::min<std::int64_t>(6 * want + 200, dim));
    // When the step budget covers the whole space, run to exhaustion with
    // breakdown restarts; the restriction then has the exact spectrum,
    // multiplicities included. A truncated run reports the worst Ritz
    // residual bound instead. Full reorthogonalization throughout.
    const bool exhaust = maxsteps >= dim;

    Rng rng(opts.seed, "spectrum.lanczos");
    std::vector<std::vector<double>> V;
    std::vector<double> alpha;
    std::vector<double> beta{0.0};  // beta[j] couples V[j-1] and V[j]

    std::vector<double> v(dim);
    for (double& x : v) x = rng.next_symmetric(1.0);
    {
      const double s = nrm(v);
      for (double& x : v) x /= s;
    }
    V.push_back(v);

    auto solve_t = [&](int steps, Eigen::VectorXd& theta,
                       Eigen::MatrixXd& vecs) {
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(steps, steps);
      for (int i = 0; i < steps; ++i) {
        T(i, i) = alpha[i];
        if (i + 1 < steps) T(i, i + 1) = T(i + 1, i) = beta[i + 1];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ts(T);
      theta = ts.eigenvalues();
      vecs = ts.eigenvectors();
    };

    Eigen::VectorXd theta;
    Eigen::MatrixXd vecs;
    double worst = 0.0;
    double tail_beta = 0.0;
    bool done = false;
    int steps = 0;
    for (int j = 0; j < maxsteps && !done; ++j) {
      std::vector<double> w = apply(V[j]);
      if (j > 0 && beta[j] != 0.0) axpy(-beta[j], V[j - 1], w);
      const double a = dot(w, V[j]);
      axpy(-a, V[j], w);
      alpha.push_back(a);
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& b : V) axpy(-dot(w, b), b, w);
      }
      double bnext = nrm(w);
      steps = j + 1;
      if (steps >= maxsteps ||
          static_cast<std::int64_t>(V.size()) >= dim) {
        tail_beta = bnext;
        break;
      }
      if (bnext < 1e-12) {
        // invariant subspace: restart with a fresh orthogonal direction
        for (double& x : w) x = rng.next_symmetric(1.0);
        for (int pass = 0; pass < 3; ++pass) {
          for (const auto& b : V) axpy(-dot(w, b), b, w);
        }
        bnext = nrm(w);
        if (bnext < 1e-10) break;  // complement exhausted
        for (double& x : w) x /= bnext;
        beta.push_back(0.0);
        V.push_back(w);
        continue;
      }
      for (double& x : w) x /= bnext;
      beta.push_back(bnext);
      V.push_back(w);

      if (!exhaust && steps >= want + 2 && steps % 10 == 0) {
        solve_t(steps, theta, vecs);
        const double scale =
            std::max(std::fabs(theta(0)), std::fabs(theta(steps - 1)));
        worst = 0.0;
        for (int i = 0; i < std::min(want, steps); ++i) {
          worst = std::max(worst,
                           std::fabs(bnext * vecs(steps - 1, i)));
        }
        if (worst <= 1e-9 * std::max(scale, 1e-30)) done = true;
      }
    }
    solve_t(steps, theta, vecs);
    if (exhaust) {
      done = true;
      worst = 0.0;
    } else if (!done) {
      // the run ended on the step budget: report the final Ritz
      // residual bounds rather than staying silent
      const double scale =
          std::max(std::fabs(theta(0)), std::fabs(theta(steps - 1)));
      worst = 0.0;
      for (int i = 0; i < std::min(want, steps); ++i) {
        worst = std::max(worst,
                         std::fabs(tail_beta * vecs(steps - 1, i)));
      }
      done = worst <= 1e-9 * std::max(scale, 1e-30);
    }
    const int have = std::min<int>(want, static_cast<int>(theta.size()));
    all.assign(theta.data(), theta.data() + have);
    res.max_residual = worst;
    res.converged = done;
  }

  std::sort(all.begin(), all.end());
  double amax = 0.0;
  for (double v : all) amax = std::max(amax, std::fabs(v));
  res.tau = tau > 0.0 ? tau : 1e-8 * std::max(amax, 1e-30);
  for (double v : all) {
    if (v < -res.tau) ++res.index;
    if (std::fabs(v) <= res.tau) ++res.nullity;
  }
  const int keep = std::min<std::int64_t>(k, static_cast<int>(all.size()));
  res.eigenvalues.assign(all.begin(), all.begin() + keep);

  if (opts.want_gauge_rank && dim <= opts.dense_limit) {
    res.gauge_rank = compute_gauge_rank(D);
  }
  return res;
}

}  // namespace biym
