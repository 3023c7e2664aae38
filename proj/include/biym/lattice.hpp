#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "biym/algebra.hpp"

namespace biym {

// Periodic hypercubic lattice standing in for the flat torus. Sites are
// numbered in lexicographic coordinate order (axis 0 most significant);
// p-cells are (site, strictly increasing axis tuple).
class Lattice {
 public:
  static constexpr int kMaxDegree = 3;
  static constexpr int kMaxDim = 6;

  Lattice(int n, std::vector<int> extents, double h);
  static std::shared_ptr<const Lattice> make(int n, std::vector<int> extents,
                                             double h);

  int dim() const { return n_; }
  double spacing() const { return h_; }
  const std::vector<int>& extents() const { return extents_; }
  std::int64_t num_sites() const { return nsites_; }

  int num_comps(int p) const { return ncomp_[p]; }  // C(n, p)
  std::int64_t num_cells(int p) const { return nsites_ * ncomp_[p]; }

  // Coordinates wrap modulo the extents (periodicity).
  std::int64_t site_index(const int* coords) const;
  void site_coords(std::int64_t site, int* coords) const;
  std::int64_t step(std::int64_t site, int axis, int dir) const {
    return dir > 0 ? fwd_[site * n_ + axis] : bwd_[site * n_ + axis];
  }

  const std::array<std::uint8_t, 3>& tuple(int p, int comp) const {
    return tuples_[p][comp];
  }
  int comp2(int mu, int nu) const { return comp2_[mu * n_ + nu]; }  // mu < nu
  int comp3(int mu, int nu, int rho) const {                        // sorted
    return comp3_[(mu * n_ + nu) * n_ + rho];
  }

  // Dropping the j-th axis of a degree-p tuple -> degree p-1 component.
  int remove_axis(int p, int comp, int j) const {
    return remove_[p][comp * p + j];
  }

  struct Insert {
    int comp;  // -1 when the axis is already present
    int sign;  // parity of sorting the axis into the tuple
  };
  // Inserting axis mu into a degree-p tuple -> degree p+1 component.
  Insert insert_axis(int p, int comp, int mu) const {
    return insert_[p][comp * n_ + mu];
  }

  bool same_spec(const Lattice& o) const;

 private:
  int n_;
  std::vector<int> extents_;
  double h_;
  std::int64_t nsites_;
  std::array<int, kMaxDegree + 2> ncomp_{};
  std::vector<std::int64_t> strides_;
  std::vector<std::int64_t> fwd_, bwd_;
  std::array<std::vector<std::array<std::uint8_t, 3>>, kMaxDegree + 2>
      tuples_;
  std::vector<int> comp2_, comp3_;
  std::array<std::vector<int>, kMaxDegree + 2> remove_;
  std::array<std::vector<Insert>, kMaxDegree + 1> insert_;
};

// Conformal multiple of the flat metric: g = c(x) g_flat, c > 0 per site.
class ConformalMetric {
 public:
  static ConformalMetric uniform(std::shared_ptr<const Lattice> lat,
                                 double value = 1.0);
  static ConformalMetric from_field(std::shared_ptr<const Lattice> lat,
                                    std::vector<double> c);

  const std::shared_ptr<const Lattice>& lattice() const { return lat_; }
  double c(std::int64_t site) const { return c_[site]; }
  const std::vector<double>& field() const { return c_; }
  bool is_uniform() const { return uniform_; }
  double uniform_value() const;

  // c^(n/2 - p) h^(n - 2p): the factor that turns the per-cell algebra
  // pairing into the global L2 pairing of p-forms. Anchored at the cell's
  // base site.
  double weight(int p, std::int64_t site) const;
  double volume(std::int64_t site) const { return weight(0, site); }

 private:
  ConformalMetric(std::shared_ptr<const Lattice> lat, std::vector<double> c,
                  bool uniform);

  std::shared_ptr<const Lattice> lat_;
  std::vector<double> c_;
  bool uniform_;
  std::array<double, Lattice::kMaxDegree + 2> wcache_{};
};

// Field of algebra elements indexed by p-cells; the canonical
// antisymmetric representative (increasing axis tuples) is stored.
class PForm {
 public:
  PForm(std::shared_ptr<const Lattice> lat, int p, int m);

  int degree() const { return p_; }
  int fiber_dim() const { return m_; }
  const std::shared_ptr<const Lattice>& lattice() const { return lat_; }
  std::int64_t num_cells() const { return ncells_; }

  double* at(std::int64_t site, int comp) {
    return data_.data() + (site * ncomp_ + comp) * mm_;
  }
  const double* at(std::int64_t site, int comp) const {
    return data_.data() + (site * ncomp_ + comp) * mm_;
  }

  AlgebraElement get(std::int64_t site, int comp) const;
  void set(std::int64_t site, int comp, const AlgebraElement& v);

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  void axpy(double s, const PForm& x);  // *this += s x
  void scale(double s);
  double max_abs() const;
  double skew_defect() const;

 private:
  std::shared_ptr<const Lattice> lat_;
  int p_, m_, mm_, ncomp_;
  std::int64_t ncells_;
  std::vector<double> data_;
};

void check_same_shape(const PForm& a, const PForm& b, const char* where);

double weight(const ConformalMetric& g, int p, std::int64_t site);

// Global L2 pairing: sum over p-cells of weight * <a, b>_algebra.
double inner_form(const PForm& a, const PForm& b, const ConformalMetric& g);
double norm_form(const PForm& a, const ConformalMetric& g);

// Orthonormal-frame squared norm of a 2-form at a site:
// sum_{mu<nu} <f, f> / (c^2 h^4).
double pointwise_norm2(const PForm& f, const ConformalMetric& g,
                       std::int64_t site);
std::vector<double> pointwise_norm2_field(const PForm& f,
                                          const ConformalMetric& g);

// Multiplies each cell value by the scalar anchored at the cell's base site.
void scale_by_site(PForm& f, const std::vector<double>& s);

PForm random_form(std::shared_ptr<const Lattice> lat, int p, int m,
                  std::uint64_t seed, double amplitude);
// c(x) = exp(uniform(-spread, spread)); positive by construction.
ConformalMetric random_metric(std::shared_ptr<const Lattice> lat,
                              std::uint64_t seed, double spread);

}  // namespace biym
