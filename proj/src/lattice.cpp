#include "biym/lattice.hpp"

#include <cmath>
#include <stdexcept>

#include "biym/rng.hpp"
#include "biym/threading.hpp"

namespace biym {

namespace {

int binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return static_cast<int>(r);
}

}  // namespace

Lattice::Lattice(int n, std::vector<int> extents, double h)
    : n_(n), extents_(std::move(extents)), h_(h) {
  if (n < 2 || n > kMaxDim) {
    throw std::invalid_argument("Lattice: dimension must be in [2, 6]");
  }
  if (static_cast<int>(extents_.size()) != n) {
    throw std::invalid_argument("Lattice: extents size != dimension");
  }
  for (int L : extents_) {
    if (L < 3) throw std::invalid_argument("Lattice: extents must be >= 3");
  }
  if (!(h > 0.0)) throw std::invalid_argument("Lattice: spacing must be > 0");

  nsites_ = 1;
  for (int L : extents_) nsites_ *= L;

  // lexicographic order: axis 0 most significant, last axis fastest
  strides_.assign(n_, 1);
  for (int mu = n_ - 2; mu >= 0; --mu) {
    strides_[mu] = strides_[mu + 1] * extents_[mu + 1];
  }

  for (int p = 0; p <= kMaxDegree + 1; ++p) ncomp_[p] = binom(n_, p);

  tuples_[0].push_back({0, 0, 0});
  for (int mu = 0; mu < n_; ++mu) {
    tuples_[1].push_back({static_cast<std::uint8_t>(mu), 0, 0});
  }
  comp2_.assign(n_ * n_, -1);
  for (int mu = 0; mu < n_; ++mu) {
    for (int nu = mu + 1; nu < n_; ++nu) {
      comp2_[mu * n_ + nu] = static_cast<int>(tuples_[2].size());
      tuples_[2].push_back(
          {static_cast<std::uint8_t>(mu), static_cast<std::uint8_t>(nu), 0});
    }
  }
  comp3_.assign(n_ * n_ * n_, -1);
  for (int mu = 0; mu < n_; ++mu) {
    for (int nu = mu + 1; nu < n_; ++nu) {
      for (int rho = nu + 1; rho < n_; ++rho) {
        comp3_[(mu * n_ + nu) * n_ + rho] =
            static_cast<int>(tuples_[3].size());
        tuples_[3].push_back({static_cast<std::uint8_t>(mu),
                              static_cast<std::uint8_t>(nu),
                              static_cast<std::uint8_t>(rho)});
      }
    }
  }
  // degree 4 only exists so insert_axis at p = 3 stays well-defined
  for (int a = 0; a < n_; ++a) {
    for (int b = a + 1; b < n_; ++b) {
      for (int c = b + 1; c < n_; ++c) {
        for (int d = c + 1; d < n_; ++d) {
          tuples_[4].push_back({0, 0, 0});
        }
      }
    }
  }

  for (int p = 1; p <= kMaxDegree; ++p) {
    remove_[p].assign(static_cast<std::size_t>(ncomp_[p]) * p, 0);
    for (int comp = 0; comp < ncomp_[p]; ++comp) {
      const auto& t = tuples_[p][comp];
      for (int j = 0; j < p; ++j) {
        int axes[3];
        int w = 0;
        for (int i = 0; i < p; ++i) {
          if (i != j) axes[w++] = t[i];
        }
        int idx = 0;
        if (p == 1) {
          idx = 0;
        } else if (p == 2) {
          idx = axes[0];
        } else {
          idx = comp2(axes[0], axes[1]);
        }
        remove_[p][comp * p + j] = idx;
      }
    }
  }

  for (int p = 0; p <= kMaxDegree; ++p) {
    if (p + 1 > n_) break;
    insert_[p].assign(static_cast<std::size_t>(ncomp_[p]) * n_, {-1, 0});
    for (int comp = 0; comp < ncomp_[p]; ++comp) {
      const auto& t = tuples_[p][comp];
      for (int mu = 0; mu < n_; ++mu) {
        bool present = false;
        int pos = 0;
        for (int i = 0; i < p; ++i) {
          if (t[i] == mu) present = true;
          if (t[i] < mu) ++pos;
        }
        if (present) continue;
        int sorted[4];
        for (int i = 0; i < pos; ++i) sorted[i] = t[i];
        sorted[pos] = mu;
        for (int i = pos; i < p; ++i) sorted[i + 1] = t[i];
        int idx = 0;
        if (p == 0) {
          idx = mu;
        } else if (p == 1) {
          idx = comp2(sorted[0], sorted[1]);
        } else if (p == 2) {
          idx = comp3(sorted[0], sorted[1], sorted[2]);
        } else {
          // degree-4 target; only the sign matters downstream but keep a
          // valid index anyway
          idx = 0;
          int seen = 0;
          for (int a = 0; a < n_ && seen == 0; ++a) {
            for (int b = a + 1; b < n_; ++b) {
              for (int c = b + 1; c < n_; ++c) {
                for (int d = c + 1; d < n_; ++d) {
                  if (a == sorted[0] && b == sorted[1] && c == sorted[2] &&
                      d == sorted[3]) {
                    seen = 1;
                    break;
                  }
                  ++idx;
                }
                if (seen) break;
              }
              if (seen) break;
            }
          }
        }
        insert_[p][comp * n_ + mu] = {idx, (pos % 2 == 0) ? 1 : -1};
      }
    }
  }

  fwd_.resize(nsites_ * n_);
  bwd_.resize(nsites_ * n_);
  std::vector<int> coords(n_);
  for (std::int64_t s = 0; s < nsites_; ++s) {
    site_coords(s, coords.data());
    for (int mu = 0; mu < n_; ++mu) {
      int keep = coords[mu];
      coords[mu] = keep + 1;
      fwd_[s * n_ + mu] = site_index(coords.data());
      coords[mu] = keep - 1;
      bwd_[s * n_ + mu] = site_index(coords.data());
      coords[mu] = keep;
    }
  }
}

std::shared_ptr<const Lattice> Lattice::make(int n, std::vector<int> extents,
                                             double h) {
  return std::make_shared<const Lattice>(n, std::move(extents), h);
}

std::int64_t Lattice::site_index(const int* coords) const {
  std::int64_t s = 0;
  for (int mu = 0; mu < n_; ++mu) {
    int L = extents_[mu];
    int c = coords[mu] % L;
    if (c < 0) c += L;
    s += static_cast<std::int64_t>(c) * strides_[mu];
  }
  return s;
}

void Lattice::site_coords(std::int64_t site, int* coords) const {
  for (int mu = 0; mu < n_; ++mu) {
    coords[mu] = static_cast<int>((site / strides_[mu]) % extents_[mu]);
  }
}

bool Lattice::same_spec(const Lattice& o) const {
  return n_ == o.n_ && extents_ == o.extents_ && h_ == o.h_;
}

ConformalMetric::ConformalMetric(std::shared_ptr<const Lattice> lat,
                                 std::vector<double> c, bool uniform)
    : lat_(std::move(lat)), c_(std::move(c)), uniform_(uniform) {
  if (uniform_) {
    const int n = lat_->dim();
    const double h = lat_->spacing();
    for (int p = 0; p <= Lattice::kMaxDegree + 1; ++p) {
      wcache_[p] = std::pow(c_[0], 0.5 * n - p) * std::pow(h, n - 2 * p);
    }
  }
}

ConformalMetric ConformalMetric::uniform(std::shared_ptr<const Lattice> lat,
                                         double value) {
  if (!(value > 0.0)) {
    throw std::invalid_argument("ConformalMetric: factor must be positive");
  }
  std::vector<double> c(lat->num_sites(), value);
  return ConformalMetric(std::move(lat), std::move(c), true);
}

ConformalMetric ConformalMetric::from_field(
    std::shared_ptr<const Lattice> lat, std::vector<double> c) {
  if (static_cast<std::int64_t>(c.size()) != lat->num_sites()) {
    throw std::invalid_argument("ConformalMetric: field size != site count");
  }
  bool uniform = true;
  for (double v : c) {
    if (!(v > 0.0)) {
      throw std::invalid_argument("ConformalMetric: factor must be positive");
    }
    if (v != c[0]) uniform = false;
  }
  return ConformalMetric(std::move(lat), std::move(c), uniform);
}

double ConformalMetric::uniform_value() const {
  if (!uniform_) {
    throw std::logic_error("ConformalMetric: metric is not uniform");
  }
  return c_[0];
}

double ConformalMetric::weight(int p, std::int64_t site) const {
  if (uniform_) return wcache_[p];
  const int n = lat_->dim();
  return std::pow(c_[site], 0.5 * n - p) *
         std::pow(lat_->spacing(), n - 2 * p);
}

PForm::PForm(std::shared_ptr<const Lattice> lat, int p, int m)
    : lat_(std::move(lat)), p_(p), m_(m), mm_(m * m) {
  if (p < 0 || p > Lattice::kMaxDegree) {
    throw std::invalid_argument("PForm: degree out of range");
  }
  if (m < 1 || m > AlgebraElement::kMaxDim) {
    throw std::invalid_argument("PForm: fiber dimension out of range");
  }
  ncomp_ = lat_->num_comps(p);
  ncells_ = lat_->num_cells(p);
  data_.assign(static_cast<std::size_t>(ncells_) * mm_, 0.0);
}

AlgebraElement PForm::get(std::int64_t site, int comp) const {
  AlgebraElement v(m_);
  const double* src = at(site, comp);
  for (int k = 0; k < mm_; ++k) v.data()[k] = src[k];
  return v;
}

void PForm::set(std::int64_t site, int comp, const AlgebraElement& v) {
  if (v.dim() != m_) {
    throw std::invalid_argument("PForm::set: fiber dimension mismatch");
  }
  double* dst = at(site, comp);
  for (int k = 0; k < mm_; ++k) dst[k] = v.data()[k];
}

void PForm::axpy(double s, const PForm& x) {
  check_same_shape(*this, x, "PForm::axpy");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += s * x.data_[k];
}

void PForm::scale(double s) {
  for (double& v : data_) v *= s;
}

double PForm::max_abs() const {
  double r = 0.0;
  for (double v : data_) r = std::max(r, std::fabs(v));
  return r;
}

double PForm::skew_defect() const {
  double r = 0.0;
  for (std::int64_t cell = 0; cell < ncells_; ++cell) {
    const double* a = data_.data() + cell * mm_;
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < m_; ++j) {
        r = std::max(r, std::fabs(a[i * m_ + j] + a[j * m_ + i]));
      }
    }
  }
  return r;
}

void check_same_shape(const PForm& a, const PForm& b, const char* where) {
  if (a.degree() != b.degree() || a.fiber_dim() != b.fiber_dim() ||
      !a.lattice()->same_spec(*b.lattice())) {
    throw std::invalid_argument(std::string(where) + ": shape mismatch");
  }
}

double weight(const ConformalMetric& g, int p, std::int64_t site) {
  return g.weight(p, site);
}

double inner_form(const PForm& a, const PForm& b, const ConformalMetric& g) {
  check_same_shape(a, b, "inner_form");
  if (!a.lattice()->same_spec(*g.lattice())) {
    throw std::invalid_argument("inner_form: metric lattice mismatch");
  }
  const Lattice& lat = *a.lattice();
  const std::int64_t nsites = lat.num_sites();
  const int ncomp = lat.num_comps(a.degree());
  const int m = a.fiber_dim();
  const int p = a.degree();

  std::vector<double> partial(nsites);
#pragma omp parallel for schedule(static) if (nsites > kParallelGrain)
  for (std::int64_t s = 0; s < nsites; ++s) {
    double acc = 0.0;
    for (int c = 0; c < ncomp; ++c) {
      acc += alg::inner(m, a.at(s, c), b.at(s, c));
    }
    partial[s] = acc * g.weight(p, s);
  }
  double total = 0.0;
  for (std::int64_t s = 0; s < nsites; ++s) total += partial[s];
  return total;
}

double norm_form(const PForm& a, const ConformalMetric& g) {
  return std::sqrt(inner_form(a, a, g));
}

double pointwise_norm2(const PForm& f, const ConformalMetric& g,
                       std::int64_t site) {
  if (f.degree() != 2) {
    throw std::invalid_argument("pointwise_norm2: degree must be 2");
  }
  const Lattice& lat = *f.lattice();
  const int m = f.fiber_dim();
  double acc = 0.0;
  for (int c = 0; c < lat.num_comps(2); ++c) {
    acc += alg::inner(m, f.at(site, c), f.at(site, c));
  }
  const double ch2 = g.c(site) * lat.spacing() * lat.spacing();
  return acc / (ch2 * ch2);
}

std::vector<double> pointwise_norm2_field(const PForm& f,
                                          const ConformalMetric& g) {
  const std::int64_t nsites = f.lattice()->num_sites();
  std::vector<double> q(nsites);
#pragma omp parallel for schedule(static) if (nsites > kParallelGrain)
  for (std::int64_t s = 0; s < nsites; ++s) {
    q[s] = pointwise_norm2(f, g, s);
  }
  return q;
}

void scale_by_site(PForm& f, const std::vector<double>& s) {
  const Lattice& lat = *f.lattice();
  const std::int64_t nsites = lat.num_sites();
  if (static_cast<std::int64_t>(s.size()) != nsites) {
    throw std::invalid_argument("scale_by_site: field size mismatch");
  }
  const int ncomp = lat.num_comps(f.degree());
  const int mm = f.fiber_dim() * f.fiber_dim();
#pragma omp parallel for schedule(static) if (nsites > kParallelGrain)
  for (std::int64_t site = 0; site < nsites; ++site) {
    double* base = f.at(site, 0);
    for (int k = 0; k < ncomp * mm; ++k) base[k] *= s[site];
  }
}

PForm random_form(std::shared_ptr<const Lattice> lat, int p, int m,
                  std::uint64_t seed, double amplitude) {
  PForm f(lat, p, m);
  Rng root(seed, "lattice.random_form");
  const std::int64_t ncells = f.num_cells();
  const int ncomp = lat->num_comps(p);
  for (std::int64_t cell = 0; cell < ncells; ++cell) {
    Rng rng = root.split(static_cast<std::uint64_t>(cell));
    AlgebraElement v(m);
    double u[AlgebraElement::kMaxDim * AlgebraElement::kMaxDim];
    for (int k = 0; k < m * m; ++k) u[k] = rng.next_symmetric(amplitude);
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        v.set(i, j, 0.5 * (u[i * m + j] - u[j * m + i]));
      }
    }
    f.set(cell / ncomp, static_cast<int>(cell % ncomp), v);
  }
  return f;
}

ConformalMetric random_metric(std::shared_ptr<const Lattice> lat,
                              std::uint64_t seed, double spread) {
  Rng rng(seed, "lattice.random_metric");
  std::vector<double> c(lat->num_sites());
  for (double& v : c) v = std::exp(rng.next_symmetric(spread));
  return ConformalMetric::from_field(std::move(lat), std::move(c));
}

}  // namespace biym
