#pragma once

#include <string>

namespace biym {

// Integrand profile F(t), t = |curvature|^2 / 2, for the F-Yang-Mills
// family. Built-ins: the Born-Infeld profile sqrt(1+2t)-1, the quadratic
// profile t, and the power family 0.5 (1+2t)^((p-2)/2).
class DensityF {
 public:
  static DensityF born_infeld();
  static DensityF yang_mills();
  static DensityF power(double p);  // requires p > 2
  static DensityF from_name(const std::string& name, double p = 0.0);

  double value(double t) const;
  double deriv(double t) const;
  double deriv2(double t) const;

  const std::string& name() const { return name_; }
  double exponent() const { return p_; }

 private:
  enum class Kind { BornInfeld, YangMills, Power };
  DensityF(Kind kind, double p, std::string name)
      : kind_(kind), p_(p), name_(std::move(name)) {}

  Kind kind_;
  double p_ = 0.0;
  std::string name_;
};

}  // namespace biym
