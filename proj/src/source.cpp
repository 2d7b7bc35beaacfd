#include "fracwell/source.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <limits>
#include <sstream>
#include <vector>

#include "fracwell/errors.hpp"

namespace fracwell {

SourceFamily SourceFamily::two_power(Field1 a, Field1 b, Field1 q1, Field1 q2, double L,
                                     std::string description) {
  SourceFamily s;
  s.variant_ = Variant::TwoPower;
  s.a_ = std::move(a);
  s.b_ = std::move(b);
  s.q1_ = std::move(q1);
  s.q2_ = std::move(q2);
  s.L_ = L;
  s.description_ = description.empty() ? "two power" : std::move(description);
  s.sample();
  return s;
}

SourceFamily SourceFamily::single_power(double q, Field1 coeff, double L) {
  SourceFamily s;
  s.variant_ = Variant::SinglePower;
  s.a_ = std::move(coeff);
  s.b_ = [](double) { return 0.0; };
  s.q1_ = [q](double) { return q; };
  s.q2_ = [q](double) { return q; };
  s.L_ = L;
  s.description_ = "single power q=" + std::to_string(q);
  s.sample();
  return s;
}

SourceFamily SourceFamily::single_power(double q, double coeff, double L) {
  return single_power(q, [coeff](double) { return coeff; }, L);
}

SourceFamily SourceFamily::zero(double L) {
  SourceFamily s;
  s.variant_ = Variant::Zero;
  s.L_ = L;
  s.description_ = "zero";
  return s;
}

LocalSource SourceFamily::local(double x) const {
  if (variant_ == Variant::Zero) return {};
  const double cx = std::clamp(x, 0.0, L_);
  return {a_(cx), b_(cx), q1_(cx), q2_(cx)};
}

double SourceFamily::h1(double x) const {
  if (variant_ == Variant::Zero) return std::numeric_limits<double>::quiet_NaN();
  const LocalSource l = local(x);
  if (l.a == 0.0) return l.q2;
  if (l.b == 0.0) return l.q1;
  return std::min(l.q1, l.q2);
}

double SourceFamily::h2(double x) const {
  if (variant_ == Variant::Zero) return std::numeric_limits<double>::quiet_NaN();
  const LocalSource l = local(x);
  if (l.a == 0.0) return l.q2;
  if (l.b == 0.0) return l.q1;
  return std::max(l.q1, l.q2);
}

void SourceFamily::sample() {
  const int n = 129;
  h1_minus_ = h2_minus_ = std::numeric_limits<double>::infinity();
  h1_plus_ = h2_plus_ = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double x = L_ * i / (n - 1);
    const LocalSource l = local(x);
    if (!std::isfinite(l.a) || !std::isfinite(l.b) || !std::isfinite(l.q1) ||
        !std::isfinite(l.q2) || l.q1 <= 1.0 || l.q2 <= 1.0)
      throw ConfigError("source fields must be finite with exponents above 1");
    h1_minus_ = std::min(h1_minus_, h1(x));
    h1_plus_ = std::max(h1_plus_, h1(x));
    h2_minus_ = std::min(h2_minus_, h2(x));
    h2_plus_ = std::max(h2_plus_, h2(x));
  }
  try {
    const GrowthConstants gc = growth_constants(*this);
    A_ = gc.A;
    B_ = gc.B;
  } catch (const ConditionViolation&) {
    A_ = std::numeric_limits<double>::quiet_NaN();
    B_ = std::min(F(0.0, 1.0), F(0.0, -1.0));
  }
}

GrowthConstants growth_constants(const SourceFamily& src, double t_lo, double t_hi) {
  if (!(t_lo > 0.0 && t_lo < 1.0 && t_hi > 1.0))
    throw DomainError("growth_constants: need 0 < t_lo < 1 < t_hi");
  GrowthConstants out;
  if (src.is_zero()) return out;
  const int nx = 65;
  const int per_decade = 40;
  const double l0 = std::log10(t_lo);
  const double l1 = std::log10(t_hi);
  const int nt = static_cast<int>(std::ceil((l1 - l0) * per_decade)) + 1;
  std::vector<double> ts(nt);
  for (int k = 0; k < nt; ++k) ts[k] = std::pow(10.0, l0 + (l1 - l0) * k / (nt - 1));
  ts.push_back(1.0);
  std::sort(ts.begin(), ts.end());

  double A = 0.0;
  double B = std::numeric_limits<double>::infinity();
  for (int i = 0; i < nx; ++i) {
    const double x = src.L() * i / (nx - 1);
    const LocalSource l = src.local(x);
    const double h1 = src.h1(x);
    const double h2 = src.h2(x);
    auto ratio = [&](double t) {
      const double at = std::abs(t);
      return l.F(t) / std::pow(at, at >= 1.0 ? h2 : h1);
    };
    B = std::min({B, l.F(1.0), l.F(-1.0)});
    for (double sign : {1.0, -1.0}) {
      std::size_t best = 0;
      double bv = -1.0;
      for (std::size_t k = 0; k < ts.size(); ++k) {
        const double v = ratio(sign * ts[k]);
        if (v > bv) {
          bv = v;
          best = k;
        }
      }
      if (best == 0 || best + 1 == ts.size()) {
        const std::size_t nb = best == 0 ? 1 : best - 1;
        if (bv > ratio(sign * ts[nb]) * (1.0 + 1e-12)) out.A_unbounded = true;
      } else {
        // Refine inside the bracketing cells, on each side of |t| = 1 separately.
        const double lo = std::log(ts[best - 1]);
        const double hi = std::log(ts[best + 1]);
        auto neg = [&](double lt) { return -ratio(sign * std::exp(lt)); };
        if (ts[best - 1] >= 1.0 || ts[best + 1] <= 1.0) {
          auto r = boost::math::tools::brent_find_minima(neg, lo, hi, 52);
          bv = std::max(bv, -r.second);
        } else {
          auto r1 = boost::math::tools::brent_find_minima(neg, lo, 0.0, 52);
          auto r2 = boost::math::tools::brent_find_minima(neg, 0.0, hi, 52);
          bv = std::max({bv, -r1.second, -r2.second});
        }
      }
      A = std::max(A, bv);
    }
  }
  out.A = A;
  out.B = B;
  if (!(B > 0.0)) {
    std::ostringstream os;
    os << "(f0) requires min F(x,+-1) > 0, got B = " << B;
    throw ConditionViolation("f0", os.str());
  }
  return out;
}

double select_alpha(const SourceFamily& src, const KernelFamily& family) {
  const double gp = family.g_plus();
  const double alpha = gp > 2.0 ? gp : 0.5 * (2.0 + src.h1_minus());
  if (src.is_zero())
    throw ConditionViolation("f3~", "no admissible blow-up exponent for a zero source");
  const int nx = 33;
  for (int i = 0; i < nx; ++i) {
    const double x = src.L() * i / (nx - 1);
    const LocalSource l = src.local(x);
    for (int k = -60; k <= 60; ++k) {
      const double at = std::pow(10.0, 0.1 * k);
      for (double t : {at, -at}) {
        const double v = t * (l.f_prime(t) * t - (alpha - 1.0) * l.f(t));
        if (!(v > 0.0)) {
          std::ostringstream os;
          os << "(f3~) fails for alpha=" << alpha << " at x=" << x << ", t=" << t
             << " (value " << v << ")";
          throw ConditionViolation("f3~", os.str());
        }
      }
    }
  }
  return alpha;
}

}  // namespace fracwell
