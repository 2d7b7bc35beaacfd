#include "fracwell/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fracwell/errors.hpp"
#include "fracwell/quadrature.hpp"

namespace fracwell {

std::string SamplingPlan::describe() const {
  std::ostringstream os;
  os << n_x * n_x << " (x,y) pairs on a " << n_x << "x" << n_x
     << " tensor grid; log t-grid " << t_lo << ".." << t_hi << " at " << per_decade
     << " points per decade";
  return os.str();
}

bool ConditionReport::all_required_pass() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const ConditionEntry& e) { return e.pass || !e.required; });
}

const ConditionEntry* ConditionReport::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

std::vector<std::string> ConditionReport::failures() const {
  std::vector<std::string> out;
  for (const auto& e : entries)
    if (e.required && !e.pass) out.push_back(e.name);
  return out;
}

namespace {

std::vector<double> t_grid(const SamplingPlan& plan) {
  const double l0 = std::log10(plan.t_lo);
  const double l1 = std::log10(plan.t_hi);
  const int n = static_cast<int>(std::lround((l1 - l0) * plan.per_decade)) + 1;
  std::vector<double> ts(n);
  for (int k = 0; k < n; ++k) ts[k] = std::pow(10.0, l0 + (l1 - l0) * k / (n - 1));
  return ts;
}

std::vector<std::pair<double, double>> xy_pairs(const SamplingPlan& plan, double L) {
  std::vector<std::pair<double, double>> out;
  const int n = std::max(plan.n_x, 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.emplace_back(L * i / (n - 1), L * j / (n - 1));
  return out;
}

std::string fmt_point(double x, double y, double t) {
  std::ostringstream os;
  os << "(x=" << x << ", y=" << y << ", t=" << t << ")";
  return os.str();
}

// Inverse of t -> G(x,x,t) via a log-space root.
double inverse_G(const LocalKernel& k, double tau, double g_minus) {
  const double lt = std::log(tau);
  auto h = [&](double u) { return std::log(k.G(std::exp(u))) - lt; };
  double u0 = (std::log(g_minus) + lt) / g_minus;
  double lo = u0 - 1.0, hi = u0 + 1.0;
  int guard = 0;
  while (h(lo) > 0.0 && guard++ < 200) lo -= 2.0 * (hi - lo);
  guard = 0;
  while (h(hi) < 0.0 && guard++ < 200) hi += 2.0 * (hi - lo);
  return std::exp(bracketed_root(h, lo, hi, 1e-14));
}

}  // namespace

IntegrabilityResult integrability_at(const KernelFamily& family, double x) {
  const LocalKernel k = family.local(x, x);
  const double s = family.s();
  const double N = family.N();
  const double gm = family.g_minus();
  const GaussRule& rule = gauss_legendre(16);
  const double ln10 = std::log(10.0);
  // integral over one decade [10^e, 10^(e+1)] in z = ln tau
  auto decade = [&](int e) {
    double acc = 0.0;
    const double z0 = e * ln10;
    for (int i = 0; i < rule.size(); ++i) {
      const double z = z0 + ln10 * rule.nodes[i];
      const double tau = std::exp(z);
      acc += rule.weights[i] * ln10 * inverse_G(k, tau, gm) * std::exp(z * (1.0 - (N + s) / N));
    }
    return acc;
  };
  const int K = 40;
  auto tail_ratio = [](const std::vector<double>& inc) {
    std::vector<double> r;
    for (std::size_t i = inc.size() - 6; i + 1 < inc.size(); ++i) r.push_back(inc[i + 1] / inc[i]);
    std::sort(r.begin(), r.end());
    return r[r.size() / 2];
  };
  IntegrabilityResult out;
  std::vector<double> inc0, incinf;
  double sum0 = 0.0;
  for (int e = -1; e >= -K; --e) {
    inc0.push_back(decade(e));
    sum0 += inc0.back();
  }
  for (int e = 0; e < K; ++e) incinf.push_back(decade(e));
  out.tail_ratio_zero = tail_ratio(inc0);
  out.tail_ratio_inf = tail_ratio(incinf);
  out.near_zero_finite = out.tail_ratio_zero < 0.99;
  out.at_infinity_divergent = out.tail_ratio_inf >= 0.99;
  const double r = out.tail_ratio_zero;
  out.near_zero_value = out.near_zero_finite ? sum0 + inc0.back() * r / (1.0 - r)
                                             : std::numeric_limits<double>::infinity();
  return out;
}

double delta2_constant(const KernelFamily& family, const SamplingPlan& plan) {
  double K = 0.0;
  for (auto [x, y] : xy_pairs(plan, family.L())) {
    const LocalKernel k = family.local(x, y);
    for (double t : t_grid(plan)) K = std::max(K, k.G(2.0 * t) / k.G(t));
  }
  return K;
}

ConditionReport check_structural_conditions(const KernelFamily& family,
                                            const SourceFamily& src,
                                            const SamplingPlan& plan) {
  ConditionReport rep;
  rep.sampling = plan.describe();
  const auto pairs = xy_pairs(plan, family.L());
  const auto ts = t_grid(plan);
  const double gm = family.g_minus();
  const double gp = family.g_plus();
  const double rtol = 1e-9;

  auto add = [&](std::string name, bool pass, std::string witness, bool required = true) {
    rep.entries.push_back({std::move(name), pass, required, std::move(witness)});
  };

  {  // (g0) limits at 0 and infinity, via the growth rates implied by the exponents
    bool ok = true;
    std::string w;
    for (auto [x, y] : pairs) {
      const LocalKernel k = family.local(x, y);
      const double g1 = k.g(1.0);
      const double lo = k.g(plan.t_lo), hi = k.g(plan.t_hi);
      if (k.g(0.0) != 0.0 || lo > std::pow(plan.t_lo, gm - 1.0) * g1 * (1 + rtol) ||
          hi < std::pow(plan.t_hi, gm - 1.0) * g1 * (1 - rtol)) {
        ok = false;
        w = "g does not vanish at 0 or grow at infinity at " + fmt_point(x, y, plan.t_lo);
        break;
      }
    }
    add("g0", ok, ok ? "g(t_lo) <= t_lo^(g- - 1) g(1), g(t_hi) >= t_hi^(g- - 1) g(1)" : w);
  }
  {  // (g1) C^1: g' against central differences
    bool ok = true;
    double worst = 0.0;
    std::string w;
    for (auto [x, y] : pairs) {
      const LocalKernel k = family.local(x, y);
      for (double t : ts) {
        const double e = 1e-5;
        const double fd = (k.g(t * (1 + e)) - k.g(t * (1 - e))) / (2 * e * t);
        const double gpv = k.g_prime(t);
        const double rel = std::abs(fd - gpv) / std::max(std::abs(gpv), 1e-300);
        if (!std::isfinite(gpv) || rel > 1e-4) {
          ok = false;
          if (rel > worst || !std::isfinite(gpv)) {
            worst = rel;
            w = "g' mismatch " + std::to_string(rel) + " at " + fmt_point(x, y, t);
          }
        }
      }
    }
    add("g1", ok, ok ? "g' matches central differences within 1e-4" : w);
  }
  {  // (g2) strictly increasing
    bool ok = true;
    std::string w;
    std::vector<double> line;
    for (auto it = ts.rbegin(); it != ts.rend(); ++it) line.push_back(-*it);
    line.push_back(0.0);
    line.insert(line.end(), ts.begin(), ts.end());
    for (auto [x, y] : pairs) {
      const LocalKernel k = family.local(x, y);
      for (std::size_t i = 1; i < line.size(); ++i)
        if (!(k.g(line[i]) > k.g(line[i - 1]))) {
          ok = false;
          w = "g not increasing at " + fmt_point(x, y, line[i]);
        }
    }
    add("g2", ok, ok ? "g strictly increasing on the sampled grid" : w);
  }
  {  // (g3) sandwiches and g+ below the Sobolev exponent
    bool ok = true;
    std::string w;
    double worst = 0.0;
    for (auto [x, y] : pairs) {
      const LocalKernel k = family.local(x, y);
      for (double t : ts) {
        const double gv = k.g(t), Gv = k.G(t), gpv = k.g_prime(t);
        const double r1 = gv * t / Gv;
        const double r2 = gpv * t / gv;
        const double v1 = std::max(gm - r1, r1 - gp);
        const double v2 = std::max(gm - 1.0 - r2, r2 - (gp - 1.0));
        const double v = std::max(v1, v2);
        if (v > rtol * gp) {
          ok = false;
          if (v > worst) {
            worst = v;
            std::ostringstream os;
            os << "gt/G=" << r1 << ", g't/g=" << r2 << " outside [" << gm << "," << gp
               << "] at " << fmt_point(x, y, t);
            w = os.str();
          }
        }
      }
    }
    const double gstar = family.sobolev_exponent();
    if (ok && !(gp < gstar)) {
      ok = false;
      w = "g+ = " + std::to_string(gp) + " >= g*_s- = " + std::to_string(gstar);
    }
    std::ostringstream os;
    os << "g- = " << gm << ", g+ = " << gp << ", g*_s- = " << gstar;
    add("g3", ok, ok ? os.str() : w);
  }
  {  // (g4) integrability of the conjugate-type integrand
    bool ok = true;
    std::string w = "int_0^1 finite and int_1^inf divergent at sampled x";
    for (int i = 0; i < plan.n_x; ++i) {
      const double x = family.L() * i / std::max(plan.n_x - 1, 1);
      const IntegrabilityResult r = integrability_at(family, x);
      if (!r.near_zero_finite || !r.at_infinity_divergent) {
        ok = false;
        std::ostringstream os;
        os << "at x=" << x << ": decade ratio near 0 = " << r.tail_ratio_zero
           << (r.near_zero_finite ? " (finite)" : " (divergent)")
           << ", decade ratio at infinity = " << r.tail_ratio_inf
           << (r.at_infinity_divergent ? " (divergent)" : " (finite)");
        w = os.str();
        break;
      }
    }
    add("g4", ok, w);
  }
  const double h1m = src.h1_minus(), h2m = src.h2_minus(), h2p = src.h2_plus();
  const double gstar = family.sobolev_exponent();
  const double N = family.N();
  const double s = family.s();
  {
    const double lhs = std::max(2.0, gp);
    const double rhs = std::min(h1m, h2m);
    std::ostringstream os;
    os << "max{2,g+} = " << lhs << (lhs < rhs ? " < " : " >= ") << "min{h1-,h2-} = " << rhs;
    add("g5", lhs < rhs, os.str());
  }
  {
    std::ostringstream os;
    os << "h2+ = " << h2p << (h2p < gstar ? " < " : " >= ") << "g*_s- = " << gstar;
    add("g6", h2p < gstar, os.str());
  }
  {
    const double bound = gstar / 2.0 + 1.0;
    std::ostringstream os;
    os << "h2+ = " << h2p << (h2p <= bound ? " <= " : " > ") << "g*_s-/2 + 1 = " << bound;
    add("g6~", h2p <= bound, os.str(), false);
  }
  {
    const double bound = gm * (1.0 + 2.0 * s / N);
    std::ostringstream os;
    os << "h2+ = " << h2p << (h2p <= bound ? " <= " : " > ") << "g-(1+2s/N) = " << bound;
    add("g6^", h2p <= bound, os.str(), false);
  }
  {  // (g7) G(x,y,1) bounded above and below
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (auto [x, y] : pairs) {
      const double v = family.local(x, y).G(1.0);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    std::ostringstream os;
    os << "C1 = " << lo << " <= G(x,y,1) <= C2 = " << hi;
    add("g7", lo > 0.0 && std::isfinite(hi), os.str());
  }
  {
    const bool inv = family.translation_invariant();
    if (!inv) rep.warnings.push_back("exponent field is not a function of |x-y| (g8)");
    add("g8", true, inv ? "translation invariant" : "not translation invariant (warning only)",
        false);
  }
  rep.delta2_K = delta2_constant(family, plan);

  // source conditions
  const int nx = plan.n_x * plan.n_x;
  auto xs = [&](int i) { return src.L() * i / (nx - 1); };
  if (src.is_zero()) {
    add("f0", false, "zero source has B = 0");
    add("f1", true, "trivial for zero source");
    add("f2", false, "zero source has no exponents");
    add("f3", false, "zero source fails the strict inequality");
    add("f3~", false, "zero source", false);
    return rep;
  }
  {
    bool ok = true;
    std::string w;
    double B = std::numeric_limits<double>::infinity();
    for (int i = 0; i < nx; ++i) {
      const LocalSource l = src.local(xs(i));
      B = std::min({B, l.F(1.0), l.F(-1.0)});
      if (l.f(0.0) != 0.0 || !(l.f_prime(0.0) == 0.0)) {
        ok = false;
        std::ostringstream os;
        os << "f(x,0) = " << l.f(0.0) << ", f'(x,0) = " << l.f_prime(0.0) << " at x=" << xs(i);
        w = os.str();
      }
    }
    if (!(B > 0.0)) {
      ok = false;
      w = "B = min F(x,+-1) = " + std::to_string(B) + " <= 0";
    }
    add("f0", ok, ok ? "f(x,0)=f'(x,0)=0, B = " + std::to_string(B) : w);
  }
  {  // (f1) convex for t>0, concave for t<0: f' monotone away from 0
    bool ok = true;
    std::string w;
    for (int i = 0; i < nx; ++i) {
      const LocalSource l = src.local(xs(i));
      double prev = l.f_prime(ts.front());
      for (std::size_t k = 1; k < ts.size(); ++k) {
        const double v = l.f_prime(ts[k]);
        const double vn = l.f_prime(-ts[k]);
        const double vpn = l.f_prime(-ts[k - 1]);
        if (v < prev * (1 - rtol) || vn < vpn * (1 - rtol)) {
          ok = false;
          w = "f' not monotone at x=" + std::to_string(xs(i)) + ", t=" + std::to_string(ts[k]);
        }
        prev = v;
      }
    }
    add("f1", ok, ok ? "f' nondecreasing in |t| on samples" : w);
  }
  {  // (f2) sandwich and signs
    bool ok = true;
    std::string w;
    for (int i = 0; i < nx && ok; ++i) {
      const double x = xs(i);
      const LocalSource l = src.local(x);
      for (double at : ts)
        for (double t : {at, -at}) {
          const double F = l.F(t), tf = t * l.f(t);
          if (F < 0.0 || tf < 0.0 || src.h1(x) * F > tf * (1 + rtol) ||
              tf > src.h2(x) * F * (1 + rtol)) {
            ok = false;
            std::ostringstream os;
            os << "h1 F <= t f <= h2 F fails at x=" << x << ", t=" << t;
            w = os.str();
            break;
          }
        }
    }
    add("f2", ok, ok ? "h1 F <= t f <= h2 F on samples" : w);
  }
  auto f3_check = [&](double expo, std::string& w) {
    for (int i = 0; i < nx; ++i) {
      const LocalSource l = src.local(xs(i));
      for (double at : ts)
        for (double t : {at, -at}) {
          const double v = t * (l.f_prime(t) * t - (expo - 1.0) * l.f(t));
          if (!(v > 0.0)) {
            std::ostringstream os;
            os << "t(f't - (" << expo << "-1)f) = " << v << " at x=" << xs(i) << ", t=" << t;
            w = os.str();
            return false;
          }
        }
    }
    return true;
  };
  {
    std::string w;
    const bool ok = f3_check(gp, w);
    add("f3", ok, ok ? "t(f't - (g+-1)f) > 0 on samples" : w);
  }
  try {
    rep.alpha = select_alpha(src, family);
    add("f3~", true, "alpha = " + std::to_string(rep.alpha), false);
  } catch (const ConditionViolation& e) {
    add("f3~", false, e.what(), false);
  }
  return rep;
}

}  // namespace fracwell
