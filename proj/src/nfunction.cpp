#include "fracwell/nfunction.hpp"

#include <algorithm>

#include "fracwell/errors.hpp"
#include "fracwell/quadrature.hpp"

namespace fracwell {

OrliczScalar orlicz_power_log(double p) {
  OrliczScalar o;
  o.name = "power_log(p=" + std::to_string(p) + ")";
  o.G = [p](double t) {
    const double at = std::abs(t);
    return std::pow(at, p) * std::log1p(at);
  };
  o.g = [p](double t) {
    const double at = std::abs(t);
    const double v = p * std::pow(at, p - 1.0) * std::log1p(at) + std::pow(at, p) / (1.0 + at);
    return std::copysign(v, t);
  };
  o.g_prime = [p](double t) {
    const double at = std::abs(t);
    const double l = std::log1p(at);
    return p * (p - 1.0) * std::pow(at, p - 2.0) * l +
           2.0 * p * std::pow(at, p - 1.0) / (1.0 + at) -
           std::pow(at, p) / ((1.0 + at) * (1.0 + at));
  };
  o.g_minus = p;
  o.g_plus = p + 1.0;
  return o;
}

double LocalKernel::exterior_primitive(double T) const {
  if (T <= 0.0) return 0.0;
  switch (kind) {
    case Kind::Power: return std::pow(T, p) / (p * p);
    case Kind::DoublePhase: return std::pow(T, p) / (p * p) + a * std::pow(T, q) / (q * q);
    case Kind::Scalar:
      return integrate_singular_left([this](double t) { return scalar->G(t) / t; }, T,
                                     scalar->g_minus, 8, 12);
  }
  return 0.0;
}

namespace {

double clamp_to(double v, double L) { return std::clamp(v, 0.0, L); }

void check_finite(double t) {
  if (!std::isfinite(t)) throw DomainError("kernel evaluated at non-finite argument");
}

}  // namespace

KernelFamily KernelFamily::power(double p, double s, double L) {
  KernelFamily k = power_variable([p](double, double) { return p; }, s, L,
                                  "power p=" + std::to_string(p));
  k.homogeneous_ = true;
  k.const_p_ = p;
  k.g_minus_ = k.g_plus_ = p;
  return k;
}

KernelFamily KernelFamily::power_variable(Field2 p, double s, double L,
                                          std::string description) {
  if (!(s > 0.0 && s < 1.0)) throw ConfigError("fractional order s must lie in (0,1)");
  if (!(L > 0.0)) throw ConfigError("domain length must be positive");
  KernelFamily k;
  k.variant_ = Variant::PowerVariableExponent;
  k.p_field_ = std::move(p);
  k.s_ = s;
  k.L_ = L;
  k.description_ = description.empty() ? "power, variable exponent" : std::move(description);
  k.sample_exponents();
  return k;
}

KernelFamily KernelFamily::double_phase(double p, double q, Field2 a, double s, double L,
                                        std::string description) {
  if (!(s > 0.0 && s < 1.0)) throw ConfigError("fractional order s must lie in (0,1)");
  if (!(p > 1.0 && q >= p)) throw ConfigError("double phase needs 1 < p <= q");
  KernelFamily k;
  k.variant_ = Variant::DoublePhase;
  k.p_const_ = p;
  k.q_const_ = q;
  k.a_field_ = std::move(a);
  k.s_ = s;
  k.L_ = L;
  k.description_ = description.empty() ? "double phase" : std::move(description);
  k.g_minus_ = p;
  k.g_plus_ = q;
  const int n = 33;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double av = k.a_field_(L * i / (n - 1), L * j / (n - 1));
      if (av < 0.0 || !std::isfinite(av))
        throw ConfigError("double phase weight must be finite and nonnegative");
    }
  return k;
}

KernelFamily KernelFamily::orlicz(OrliczScalar scalar, double s, double L) {
  if (!(s > 0.0 && s < 1.0)) throw ConfigError("fractional order s must lie in (0,1)");
  KernelFamily k;
  k.variant_ = Variant::OrliczScalar;
  k.g_minus_ = scalar.g_minus;
  k.g_plus_ = scalar.g_plus;
  k.description_ = scalar.name;
  k.scalar_ = std::make_shared<OrliczScalar>(std::move(scalar));
  k.s_ = s;
  k.L_ = L;
  return k;
}

void KernelFamily::sample_exponents() {
  const int n = 65;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double v = p_field_(L_ * i / (n - 1), L_ * j / (n - 1));
      if (!std::isfinite(v) || v <= 1.0)
        throw ConfigError("exponent field must be finite and exceed 1");
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  g_minus_ = lo;
  g_plus_ = hi;
}

double KernelFamily::sobolev_exponent() const {
  const double sg = s_ * g_minus_;
  if (N() <= sg) return std::numeric_limits<double>::infinity();
  return N() * g_minus_ / (N() - sg);
}

LocalKernel KernelFamily::local(double x, double y) const {
  const double cx = clamp_to(x, L_);
  const double cy = clamp_to(y, L_);
  LocalKernel k;
  switch (variant_) {
    case Variant::PowerVariableExponent:
      k.kind = LocalKernel::Kind::Power;
      k.p = homogeneous_ ? const_p_ : p_field_(cx, cy);
      break;
    case Variant::DoublePhase:
      k.kind = LocalKernel::Kind::DoublePhase;
      k.p = p_const_;
      k.q = q_const_;
      k.a = a_field_(cx, cy);
      break;
    case Variant::OrliczScalar:
      k.kind = LocalKernel::Kind::Scalar;
      k.scalar = scalar_.get();
      break;
  }
  return k;
}

double KernelFamily::g(double x, double y, double t) const {
  check_finite(t);
  return local(x, y).g(t);
}

double KernelFamily::G(double x, double y, double t) const {
  check_finite(t);
  return local(x, y).G(t);
}

double KernelFamily::g_prime(double x, double y, double t) const {
  check_finite(t);
  if (t == 0.0 && g_minus_ < 2.0)
    throw DomainError("g' is singular at t = 0 for exponents below 2");
  return local(x, y).g_prime(t);
}

double KernelFamily::complementary(double x, double y, double t) const {
  check_finite(t);
  if (t < 0.0) throw DomainError("complementary function needs t >= 0");
  if (t == 0.0) return 0.0;
  const LocalKernel k = local(x, y);
  if (k.kind == LocalKernel::Kind::Power) {
    const double pc = k.p / (k.p - 1.0);
    return std::pow(t, pc) / pc;
  }
  // The supremum of t tau - G(tau) sits where g(tau) = t.
  double hi = 1.0;
  int grow = 0;
  while (k.g(hi) < t) {
    hi *= 2.0;
    if (++grow > 2000 || !std::isfinite(hi))
      throw NumericError("complementary: maximizer bracket not found for t=" +
                         std::to_string(t));
  }
  double lo = hi;
  while (k.g(lo) > t && lo > 1e-300) lo *= 0.5;
  if (k.g(lo) > t) return 0.0;
  const double tau = bracketed_root([&](double v) { return k.g(v) - t; }, lo, hi, 1e-15);
  return t * tau - k.G(tau);
}

bool KernelFamily::translation_invariant() const {
  if (variant_ == Variant::OrliczScalar) return true;
  if (homogeneous_) return true;
  const int n = 9;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = 0.5 * L_ * i / (n - 1);
      const double y = 0.5 * L_ * j / (n - 1);
      for (double shift : {0.1 * L_, 0.25 * L_, 0.5 * L_}) {
        const LocalKernel a = local(x, y);
        const LocalKernel b = local(x + shift, y + shift);
        if (std::abs(a.p - b.p) > 1e-12 || std::abs(a.a - b.a) > 1e-12) return false;
      }
    }
  return true;
}

}  // namespace fracwell
