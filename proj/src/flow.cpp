#include "biym/flow.hpp"

#include <cmath>
#include <stdexcept>

namespace biym {

void FlowConfig::validate() const {
  if (!(residual_tol > 0.0)) {
    throw std::invalid_argument("FlowConfig: residual_tol must be > 0");
  }
  if (max_iters < 0) {
    throw std::invalid_argument("FlowConfig: max_iters must be >= 0");
  }
  if (!(initial_step > 0.0)) {
    throw std::invalid_argument("FlowConfig: initial_step must be > 0");
  }
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) {
    throw std::invalid_argument("FlowConfig: armijo_c must be in (0, 1)");
  }
  if (!(backtrack > 0.0 && backtrack < 1.0)) {
    throw std::invalid_argument("FlowConfig: backtrack must be in (0, 1)");
  }
  if (!(newton_crossover > 0.0)) {
    throw std::invalid_argument("FlowConfig: newton_crossover must be > 0");
  }
  if (newton_max_iters < 1 || cg_max_iters < 1) {
    throw std::invalid_argument("FlowConfig: newton iteration caps must be >= 1");
  }
}

const char* to_string(FlowStatus s) {
  switch (s) {
    case FlowStatus::Converged:
      return "converged";
    case FlowStatus::MaxIters:
      return "max_iters";
    case FlowStatus::LineSearchFailure:
      return "line_search_failure";
  }
  return "unknown";
}

namespace {

// Approximately solves hess_operator(D, p) = grad by conjugate gradients,
// stopping on the forcing tolerance, the iteration cap, or a direction of
// non-positive curvature. Falls back to the gradient when no progress was
// possible, so the result is always a descent candidate.
PForm newton_direction(const Connection& D, const ConformalMetric& g,
                       const DensityF& F, const PForm& grad, int cg_max) {
  PForm x(grad.lattice(), 1, grad.fiber_dim());
  PForm r = grad;
  PForm p = grad;
  double rr = inner_form(r, r, g);
  const double rr0 = rr;
  bool moved = false;
  for (int j = 0; j < cg_max && rr > 1e-26 * (1.0 + rr0); ++j) {
    const PForm Ap = hess_operator(D, p, g, F);
    const double pAp = inner_form(p, Ap, g);
    if (!(pAp > 1e-14 * inner_form(p, p, g))) break;
    const double alpha = rr / pAp;
    x.axpy(alpha, p);
    moved = true;
    r.axpy(-alpha, Ap);
    const double rr_next = inner_form(r, r, g);
    if (rr_next <= 0.01 * rr0) break;
    p.scale(rr_next / rr);
    p.axpy(1.0, r);
    rr = rr_next;
  }
  return moved ? x : grad;
}

}  // namespace

FlowResult minimize(const Connection& start, const ConformalMetric& g,
                    const DensityF& F, const FlowConfig& cfg) {
  cfg.validate();
  constexpr double kStepFloor = 1e-16;
  constexpr double kStepCeil = 1e6;

  Connection D = start;
  double E = energy(D, g, F);
  PForm grad = el_residual(D, g, F);
  double res2 = inner_form(grad, grad, g);
  double res = std::sqrt(res2);

  FlowResult out{D, FlowStatus::MaxIters, {}, E, res};
  out.trace.push_back({0, E, res, 0.0});
  if (res <= cfg.residual_tol) {
    out.status = FlowStatus::Converged;
    return out;
  }
  const bool newton_ready = cfg.newton_tail && g.is_uniform();

  auto finish = [&](FlowStatus status) {
    out.status = status;
    out.connection = D;
    out.final_energy = E;
    out.final_residual = res;
    return out;
  };

  std::int64_t iter = 0;
  double prev_step = cfg.initial_step;
  while (iter < cfg.max_iters && !(newton_ready && res <= cfg.newton_crossover)) {
    ++iter;
    double t = (iter == 1) ? cfg.initial_step
                           : std::min(2.0 * prev_step, kStepCeil);
    bool accepted = false;
    Connection cand = D;
    double Ec = E;
    while (t >= kStepFloor) {
      cand.alpha = D.alpha;
      cand.alpha.axpy(-t, grad);
      Ec = energy(cand, g, F);
      if (Ec <= E - cfg.armijo_c * t * res2) {
        accepted = true;
        break;
      }
      t *= cfg.backtrack;
    }
    if (!accepted) return finish(FlowStatus::LineSearchFailure);
    D = cand;
    E = Ec;
    grad = el_residual(D, g, F);
    res2 = inner_form(grad, grad, g);
    res = std::sqrt(res2);
    prev_step = t;
    out.trace.push_back({iter, E, res, t});
    if (res <= cfg.residual_tol) return finish(FlowStatus::Converged);
  }
  if (!newton_ready || res <= cfg.residual_tol) {
    return finish(res <= cfg.residual_tol ? FlowStatus::Converged
                                          : FlowStatus::MaxIters);
  }

  // curvature-aware tail
  for (int k = 0; k < cfg.newton_max_iters; ++k) {
    PForm dir = newton_direction(D, g, F, grad, cfg.cg_max_iters);
    double slope = inner_form(grad, dir, g);
    if (!(slope > 0.0)) {
      dir = grad;
      slope = res2;
    }
    double t = 1.0;
    bool accepted = false;
    Connection cand = D;
    double Ec = E;
    while (t >= kStepFloor) {
      cand.alpha = D.alpha;
      cand.alpha.axpy(-t, dir);
      Ec = energy(cand, g, F);
      if (Ec <= E - cfg.armijo_c * t * slope) {
        accepted = true;
        break;
      }
      t *= cfg.backtrack;
    }
    if (!accepted) return finish(FlowStatus::LineSearchFailure);
    D = cand;
    E = Ec;
    grad = el_residual(D, g, F);
    res2 = inner_form(grad, grad, g);
    res = std::sqrt(res2);
    ++iter;
    out.trace.push_back({iter, E, res, t});
    if (res <= cfg.residual_tol) return finish(FlowStatus::Converged);
  }
  return finish(FlowStatus::MaxIters);
}

Connection random_connection(std::shared_ptr<const Lattice> lat, int m,
                             std::uint64_t seed, double amplitude) {
  if (amplitude < 0.0) {
    throw std::invalid_argument("random_connection: amplitude must be >= 0");
  }
  return Connection(random_form(std::move(lat), 1, m, seed, amplitude));
}

}  // namespace biym
