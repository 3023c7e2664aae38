#include "biym/algebra.hpp"

#include <cmath>
#include <stdexcept>

#include "biym/rng.hpp"

namespace biym {

namespace alg {

void bracket(int m, const double* a, const double* b, double* out) {
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      double s = 0.0;
      for (int k = 0; k < m; ++k) {
        s += a[i * m + k] * b[k * m + j] - b[i * m + k] * a[k * m + j];
      }
      out[i * m + j] = s;
    }
  }
}

void bracket_acc(int m, double s, const double* a, const double* b,
                 double* out) {
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      double v = 0.0;
      for (int k = 0; k < m; ++k) {
        v += a[i * m + k] * b[k * m + j] - b[i * m + k] * a[k * m + j];
      }
      out[i * m + j] += s * v;
    }
  }
}

double inner(int m, const double* a, const double* b) {
  double s = 0.0;
  for (int k = 0; k < m * m; ++k) s += a[k] * b[k];
  return 0.5 * s;
}

}  // namespace alg

AlgebraElement::AlgebraElement(int m) : m_(m) {
  if (m < 1 || m > kMaxDim) {
    throw std::invalid_argument("AlgebraElement: fiber dimension out of range");
  }
}

void AlgebraElement::set(int i, int j, double v) {
  if (i == j) {
    if (v != 0.0) {
      throw std::invalid_argument("AlgebraElement: nonzero diagonal entry");
    }
    return;
  }
  a_[i * m_ + j] = v;
  a_[j * m_ + i] = -v;
}

double AlgebraElement::max_abs() const {
  double r = 0.0;
  for (int k = 0; k < m_ * m_; ++k) r = std::max(r, std::fabs(a_[k]));
  return r;
}

double AlgebraElement::skew_defect() const {
  double r = 0.0;
  for (int i = 0; i < m_; ++i) {
    for (int j = 0; j < m_; ++j) {
      r = std::max(r, std::fabs(a_[i * m_ + j] + a_[j * m_ + i]));
    }
  }
  return r;
}

AlgebraElement& AlgebraElement::operator+=(const AlgebraElement& o) {
  for (int k = 0; k < m_ * m_; ++k) a_[k] += o.a_[k];
  return *this;
}

AlgebraElement& AlgebraElement::operator-=(const AlgebraElement& o) {
  for (int k = 0; k < m_ * m_; ++k) a_[k] -= o.a_[k];
  return *this;
}

AlgebraElement& AlgebraElement::operator*=(double s) {
  for (int k = 0; k < m_ * m_; ++k) a_[k] *= s;
  return *this;
}

AlgebraElement bracket(const AlgebraElement& a, const AlgebraElement& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("bracket: fiber dimension mismatch");
  }
  AlgebraElement out(a.dim());
  alg::bracket(a.dim(), a.data(), b.data(), out.data());
  return out;
}

double inner(const AlgebraElement& a, const AlgebraElement& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("inner: fiber dimension mismatch");
  }
  return alg::inner(a.dim(), a.data(), b.data());
}

AlgebraElement random_element(int m, std::uint64_t seed, double amplitude) {
  Rng rng(seed, "algebra.random_element");
  AlgebraElement out(m);
  double u[AlgebraElement::kMaxDim * AlgebraElement::kMaxDim];
  for (int k = 0; k < m * m; ++k) u[k] = rng.next_symmetric(amplitude);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      out.set(i, j, 0.5 * (u[i * m + j] - u[j * m + i]));
    }
  }
  return out;
}

int so_dim(int m) { return m * (m - 1) / 2; }

std::array<int, 2> so_pair(int m, int k) {
  int idx = 0;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      if (idx == k) return {i, j};
      ++idx;
    }
  }
  throw std::invalid_argument("so_pair: generator index out of range");
}

AlgebraElement so_generator(int m, int k) {
  auto [i, j] = so_pair(m, k);
  AlgebraElement out(m);
  out.set(i, j, 1.0);
  return out;
}

}  // namespace biym
