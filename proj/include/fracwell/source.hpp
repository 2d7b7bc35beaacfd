#pragma once

#include <cmath>
#include <string>

#include "fracwell/nfunction.hpp"

namespace fracwell {

// Source frozen at one x; used inside the 1-D quadrature loops.
struct LocalSource {
  double a = 0.0;
  double b = 0.0;
  double q1 = 2.0;
  double q2 = 2.0;

  double f(double t) const {
    const double at = std::abs(t);
    double v = 0.0;
    if (a != 0.0) v += a * std::pow(at, q1 - 1.0);
    if (b != 0.0) v += b * std::pow(at, q2 - 1.0);
    return std::copysign(v, t);
  }
  double F(double t) const {
    const double at = std::abs(t);
    double v = 0.0;
    if (a != 0.0) v += a * std::pow(at, q1) / q1;
    if (b != 0.0) v += b * std::pow(at, q2) / q2;
    return v;
  }
  double f_prime(double t) const {
    const double at = std::abs(t);
    double v = 0.0;
    if (a != 0.0) v += a * (q1 - 1.0) * std::pow(at, q1 - 2.0);
    if (b != 0.0) v += b * (q2 - 1.0) * std::pow(at, q2 - 2.0);
    return v;
  }
};

// f(x, t) and its primitive F over Omega = (0, L).
class SourceFamily {
 public:
  enum class Variant { TwoPower, SinglePower, Zero };

  static SourceFamily two_power(Field1 a, Field1 b, Field1 q1, Field1 q2, double L = 1.0,
                                std::string description = {});
  static SourceFamily single_power(double q, Field1 coeff, double L = 1.0);
  static SourceFamily single_power(double q, double coeff = 1.0, double L = 1.0);
  static SourceFamily zero(double L = 1.0);

  Variant variant() const { return variant_; }
  bool is_zero() const { return variant_ == Variant::Zero; }
  double L() const { return L_; }
  const std::string& description() const { return description_; }

  LocalSource local(double x) const;
  double f(double x, double t) const { return local(x).f(t); }
  double F(double x, double t) const { return local(x).F(t); }
  double f_prime(double x, double t) const { return local(x).f_prime(t); }

  double h1(double x) const;
  double h2(double x) const;
  double h1_minus() const { return h1_minus_; }
  double h1_plus() const { return h1_plus_; }
  double h2_minus() const { return h2_minus_; }
  double h2_plus() const { return h2_plus_; }

  // Growth constants over the default t-range [1e-6, 1e6].
  double A() const { return A_; }
  double B() const { return B_; }

 private:
  SourceFamily() = default;
  void sample();

  Variant variant_ = Variant::Zero;
  Field1 a_, b_, q1_, q2_;
  double L_ = 1.0;
  double h1_minus_ = 0.0, h1_plus_ = 0.0, h2_minus_ = 0.0, h2_plus_ = 0.0;
  double A_ = 0.0, B_ = 0.0;
  std::string description_;
};

struct GrowthConstants {
  double A = 0.0;
  double B = 0.0;
  // Supremum for A still climbing at an end of the t-range.
  bool A_unbounded = false;
};

// A: sup of F/|t|^{h2} over |t| >= 1 joined with sup of F/|t|^{h1} over |t| < 1.
// B: min over x of min{F(x,1), F(x,-1)}. Throws ConditionViolation("f0") if B <= 0.
GrowthConstants growth_constants(const SourceFamily& src, double t_lo = 1e-6,
                                 double t_hi = 1e6);

// Blow-up exponent: g+ when g+ > 2, else (2 + h1-)/2; validated on samples.
double select_alpha(const SourceFamily& src, const KernelFamily& family);

}  // namespace fracwell
