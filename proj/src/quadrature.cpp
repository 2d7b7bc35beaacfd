#include "fracwell/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <map>
#include <mutex>

#include "fracwell/errors.hpp"

namespace fracwell {

namespace {

template <unsigned N>
GaussRule from_boost() {
  using Q = boost::math::quadrature::gauss<double, N>;
  const auto& x = Q::abscissa();
  const auto& w = Q::weights();
  GaussRule r;
  // Boost stores the non-negative half of the symmetric rule on [-1, 1].
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) {
      r.nodes.push_back(0.5);
      r.weights.push_back(0.5 * w[i]);
      continue;
    }
    r.nodes.push_back(0.5 * (1.0 - x[i]));
    r.weights.push_back(0.5 * w[i]);
    r.nodes.push_back(0.5 * (1.0 + x[i]));
    r.weights.push_back(0.5 * w[i]);
  }
  return r;
}

GaussRule build(int n) {
  switch (n) {
    case 1: return GaussRule{{0.5}, {1.0}};
    case 2: return from_boost<2>();
    case 3: return from_boost<3>();
    case 4: return from_boost<4>();
    case 5: return from_boost<5>();
    case 6: return from_boost<6>();
    case 7: return from_boost<7>();
    case 8: return from_boost<8>();
    case 9: return from_boost<9>();
    case 10: return from_boost<10>();
    case 11: return from_boost<11>();
    case 12: return from_boost<12>();
    case 13: return from_boost<13>();
    case 14: return from_boost<14>();
    case 15: return from_boost<15>();
    case 16: return from_boost<16>();
    case 17: return from_boost<17>();
    case 18: return from_boost<18>();
    case 19: return from_boost<19>();
    case 20: return from_boost<20>();
    case 24: return from_boost<24>();
    case 30: return from_boost<30>();
    default: throw NumericError("unsupported Gauss order " + std::to_string(n));
  }
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build(n)).first;
  return it->second;
}

double integrate_singular_left(const std::function<double(double)>& f, double b,
                               double a_min, int panels, int order) {
  if (b <= 0.0) return 0.0;
  const double m = std::max(1.0, std::ceil(4.0 / std::max(a_min, 1e-3)));
  const GaussRule& rule = gauss_legendre(order);
  double total = 0.0;
  double hi = 1.0;
  for (int k = 0; k <= panels; ++k) {
    const double lo = (k == panels) ? 0.0 : hi * 0.5;
    for (int i = 0; i < rule.size(); ++i) {
      const double w = lo + (hi - lo) * rule.nodes[i];
      const double t = b * std::pow(w, m);
      const double jac = b * m * std::pow(w, m - 1.0) * (hi - lo);
      total += rule.weights[i] * jac * f(t);
    }
    hi = lo;
  }
  return total;
}

double bracketed_root(const std::function<double(double)>& f, double lo, double hi,
                      double rel_tol, int max_iter) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) throw NumericError("bracketed_root: no sign change");
  std::uintmax_t iters = static_cast<std::uintmax_t>(max_iter);
  auto tol = [rel_tol](double a, double b) {
    return std::abs(b - a) <= rel_tol * std::max(std::abs(a), std::abs(b));
  };
  auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
  return 0.5 * (a + b);
}

}  // namespace fracwell
