#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>

namespace fracwell {

using Field1 = std::function<double(double)>;
using Field2 = std::function<double(double, double)>;

// Scalar N-function given by closed forms (g odd, G its primitive, g').
struct OrliczScalar {
  std::string name;
  std::function<double(double)> g;
  std::function<double(double)> G;
  std::function<double(double)> g_prime;
  double g_minus = 0.0;
  double g_plus = 0.0;
};

// G(t) = |t|^p log(1+|t|); the quotient g t / G runs over (p, p+1].
OrliczScalar orlicz_power_log(double p);

// Kernel frozen at one point pair (x, y). Cheap to copy, evaluated in the
// inner quadrature loops.
struct LocalKernel {
  enum class Kind { Power, DoublePhase, Scalar };
  Kind kind = Kind::Power;
  double p = 2.0;
  double q = 2.0;
  double a = 0.0;
  const OrliczScalar* scalar = nullptr;

  double g(double t) const {
    switch (kind) {
      case Kind::Power:
        return p == 2.0 ? t : std::copysign(std::pow(std::abs(t), p - 1.0), t);
      case Kind::DoublePhase: {
        const double at = std::abs(t);
        return std::copysign(std::pow(at, p - 1.0) + a * std::pow(at, q - 1.0), t);
      }
      case Kind::Scalar: return scalar->g(t);
    }
    return 0.0;
  }

  double G(double t) const {
    const double at = std::abs(t);
    switch (kind) {
      case Kind::Power: return p == 2.0 ? 0.5 * at * at : std::pow(at, p) / p;
      case Kind::DoublePhase: return std::pow(at, p) / p + a * std::pow(at, q) / q;
      case Kind::Scalar: return scalar->G(at);
    }
    return 0.0;
  }

  // g'(t); +inf at t = 0 when the lower exponent is below 2.
  double g_prime(double t) const {
    const double at = std::abs(t);
    switch (kind) {
      case Kind::Power:
        if (p == 2.0) return 1.0;
        return (p - 1.0) * std::pow(at, p - 2.0);
      case Kind::DoublePhase:
        return (p - 1.0) * std::pow(at, p - 2.0) + a * (q - 1.0) * std::pow(at, q - 2.0);
      case Kind::Scalar: return scalar->g_prime(at);
    }
    return 0.0;
  }

  // g' with the argument floored at eps; only used in Jacobians.
  double g_prime_floored(double t, double eps) const {
    return g_prime(std::max(std::abs(t), eps));
  }

  // Integral of G(t)/t over (0, T]; closes the exterior integral in y.
  double exterior_primitive(double T) const;

  // Both g(t) and G(t) in one call (shares the pow).
  void g_and_G(double t, double& gv, double& Gv) const {
    if (kind == Kind::Power) {
      const double at = std::abs(t);
      if (p == 2.0) {
        gv = t;
        Gv = 0.5 * at * at;
        return;
      }
      const double pm1 = std::pow(at, p - 1.0);
      gv = std::copysign(pm1, t);
      Gv = pm1 * at / p;
      return;
    }
    gv = g(t);
    Gv = G(t);
  }
};

// The kernel pair (g, G) over Omega x Omega with Omega = (0, L), N = 1.
class KernelFamily {
 public:
  enum class Variant { PowerVariableExponent, DoublePhase, OrliczScalar };

  static KernelFamily power(double p, double s, double L = 1.0);
  static KernelFamily power_variable(Field2 p, double s, double L = 1.0,
                                     std::string description = {});
  static KernelFamily double_phase(double p, double q, Field2 a, double s,
                                   double L = 1.0, std::string description = {});
  static KernelFamily orlicz(OrliczScalar scalar, double s, double L = 1.0);

  Variant variant() const { return variant_; }
  double s() const { return s_; }
  int N() const { return 1; }
  double L() const { return L_; }
  double g_minus() const { return g_minus_; }
  double g_plus() const { return g_plus_; }
  const std::string& description() const { return description_; }

  // True for p constant: the Gagliardo modular is exactly p-homogeneous.
  bool homogeneous() const { return homogeneous_; }
  double constant_p() const { return const_p_; }
  // Kernel is t^2/2 at every point pair.
  bool quadratic() const { return homogeneous_ && const_p_ == 2.0; }

  // Lower Sobolev-type exponent g*_{,s}^- = N g^- / (N - s g^-), +inf if N <= s g^-.
  double sobolev_exponent() const;

  // Point pair is clamped to [0, L]^2 before the fields are read.
  LocalKernel local(double x, double y) const;

  double g(double x, double y, double t) const;
  double G(double x, double y, double t) const;
  double g_prime(double x, double y, double t) const;
  // sup_{tau >= 0} (t tau - G(x, y, tau)) for t >= 0.
  double complementary(double x, double y, double t) const;

  // Complementary exponents of the conjugate pair.
  double gtilde_minus() const { return g_plus_ / (g_plus_ - 1.0); }
  double gtilde_plus() const { return g_minus_ / (g_minus_ - 1.0); }

  // Exponent field is invariant under joint shifts (checked on samples).
  bool translation_invariant() const;

 private:
  KernelFamily() = default;
  void sample_exponents();

  Variant variant_ = Variant::PowerVariableExponent;
  Field2 p_field_;
  Field2 a_field_;
  double p_const_ = 2.0;
  double q_const_ = 2.0;
  std::shared_ptr<OrliczScalar> scalar_;
  double s_ = 0.5;
  double L_ = 1.0;
  double g_minus_ = 2.0;
  double g_plus_ = 2.0;
  bool homogeneous_ = false;
  double const_p_ = 0.0;
  std::string description_;
};

}  // namespace fracwell
