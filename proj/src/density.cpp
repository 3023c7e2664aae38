#include "biym/density.hpp"

#include <cmath>
#include <stdexcept>

namespace biym {

DensityF DensityF::born_infeld() {
  return DensityF(Kind::BornInfeld, 0.0, "bi");
}

DensityF DensityF::yang_mills() { return DensityF(Kind::YangMills, 0.0, "ym"); }

DensityF DensityF::power(double p) {
  if (!(p > 2.0)) {
    throw std::invalid_argument("DensityF::power: exponent must be > 2");
  }
  return DensityF(Kind::Power, p, "fp");
}

DensityF DensityF::from_name(const std::string& name, double p) {
  if (name == "bi") return born_infeld();
  if (name == "ym") return yang_mills();
  if (name == "fp") return power(p);
  throw std::invalid_argument("DensityF: unknown density '" + name + "'");
}

double DensityF::value(double t) const {
  switch (kind_) {
    case Kind::BornInfeld:
      // sqrt(1+2t) - 1 without the cancellation that would wash out
      // energies near a flat connection
      return 2.0 * t / (std::sqrt(1.0 + 2.0 * t) + 1.0);
    case Kind::YangMills:
      return t;
    case Kind::Power:
      return 0.5 * std::pow(1.0 + 2.0 * t, 0.5 * (p_ - 2.0));
  }
  return 0.0;
}

double DensityF::deriv(double t) const {
  switch (kind_) {
    case Kind::BornInfeld:
      return 1.0 / std::sqrt(1.0 + 2.0 * t);
    case Kind::YangMills:
      return 1.0;
    case Kind::Power:
      return 0.5 * (p_ - 2.0) * std::pow(1.0 + 2.0 * t, 0.5 * (p_ - 4.0));
  }
  return 0.0;
}

double DensityF::deriv2(double t) const {
  switch (kind_) {
    case Kind::BornInfeld:
      return -std::pow(1.0 + 2.0 * t, -1.5);
    case Kind::YangMills:
      return 0.0;
    case Kind::Power:
      return 0.5 * (p_ - 2.0) * (p_ - 4.0) *
             std::pow(1.0 + 2.0 * t, 0.5 * (p_ - 6.0));
  }
  return 0.0;
}

}  // namespace biym
