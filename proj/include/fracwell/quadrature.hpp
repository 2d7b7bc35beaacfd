#pragma once

#include <functional>
#include <vector>

namespace fracwell {

// Gauss-Legendre rule mapped to [0, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int size() const { return static_cast<int>(nodes.size()); }
};

// Supported orders: 1..20, 24, 30.
const GaussRule& gauss_legendre(int n);

// Integral of f over (0, b] with f ~ t^(a-1) near 0 for some a > 0: power
// substitution t = b w^m plus geometric panels in w.
double integrate_singular_left(const std::function<double(double)>& f, double b,
                               double a_min, int panels = 6, int order = 12);

// Root of f in [lo, hi] (f(lo), f(hi) of opposite sign) to relative tolerance.
double bracketed_root(const std::function<double(double)>& f, double lo, double hi,
                      double rel_tol = 1e-15, int max_iter = 200);

}  // namespace fracwell
