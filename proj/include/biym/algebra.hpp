#pragma once

#include <array>
#include <cstdint>

namespace biym {

namespace alg {

// Raw kernels on m x m row-major blocks; no aliasing between out and inputs.
void bracket(int m, const double* a, const double* b, double* out);
// out += s * (a b - b a)
void bracket_acc(int m, double s, const double* a, const double* b,
                 double* out);
// 0.5 * tr(a^T b)
double inner(int m, const double* a, const double* b);

}  // namespace alg

// Element of the fiber algebra so(m), m in [1, 4]: a skew-symmetric m x m
// real matrix. Value type; all operations keep skew-symmetry exact.
class AlgebraElement {
 public:
  static constexpr int kMaxDim = 4;

  explicit AlgebraElement(int m);

  int dim() const { return m_; }
  double operator()(int i, int j) const { return a_[i * m_ + j]; }
  // Sets (i,j) = v and (j,i) = -v. i == j requires v == 0.
  void set(int i, int j, double v);

  const double* data() const { return a_.data(); }
  double* data() { return a_.data(); }

  double max_abs() const;
  double skew_defect() const;  // max |A + A^T| entry

  AlgebraElement& operator+=(const AlgebraElement& o);
  AlgebraElement& operator-=(const AlgebraElement& o);
  AlgebraElement& operator*=(double s);

 private:
  int m_;
  std::array<double, kMaxDim * kMaxDim> a_{};
};

AlgebraElement bracket(const AlgebraElement& a, const AlgebraElement& b);
double inner(const AlgebraElement& a, const AlgebraElement& b);

// Entries uniform in [-amplitude, amplitude], then antisymmetrized.
// Deterministic per seed.
AlgebraElement random_element(int m, std::uint64_t seed, double amplitude);

int so_dim(int m);  // m (m - 1) / 2
// k-th basis generator of so(m): +1 at pair (i, j), i < j, pairs in
// row-major order. The generators are orthonormal for the inner product.
AlgebraElement so_generator(int m, int k);
// Index pair of the k-th generator.
std::array<int, 2> so_pair(int m, int k);

}  // namespace biym
