#include "fracwell/spline.hpp"

#include <algorithm>
#include <cmath>

namespace fracwell {

CubicSpline::CubicSpline(const GridFunction& u) : mesh_(u.mesh()) {
  const int n = mesh_.M + 2;  // knots 0..M+1
  const double h = mesh_.h();
  a_.resize(n);
  for (int i = 0; i < n; ++i) a_[i] = u.node_value(i);
  // second derivatives m_i with m_0 = m_{n-1} = 0: tridiagonal Thomas solve
  std::vector<double> m(n, 0.0), cp(n, 0.0), dp(n, 0.0);
  for (int i = 1; i < n - 1; ++i) {
    const double rhs = 6.0 * (a_[i + 1] - 2.0 * a_[i] + a_[i - 1]) / (h * h);
    const double denom = 4.0 - cp[i - 1];
    cp[i] = 1.0 / denom;
    dp[i] = (rhs - dp[i - 1]) / denom;
  }
  for (int i = n - 2; i >= 1; --i) m[i] = dp[i] - cp[i] * m[i + 1];
  b_.resize(n);
  c_.resize(n);
  d_.resize(n);
  for (int i = 0; i < n - 1; ++i) {
    b_[i] = (a_[i + 1] - a_[i]) / h - h * (2.0 * m[i] + m[i + 1]) / 6.0;
    c_[i] = m[i] / 2.0;
    d_[i] = (m[i + 1] - m[i]) / (6.0 * h);
  }
  b_[n - 1] = b_[n - 2] + 2.0 * c_[n - 2] * h + 3.0 * d_[n - 2] * h * h;
  c_[n - 1] = 0.0;
  d_[n - 1] = 0.0;
}

double CubicSpline::operator()(double x) const {
  if (x <= 0.0 || x >= mesh_.L) return 0.0;
  const double h = mesh_.h();
  const int c = std::min(static_cast<int>(x / h), mesh_.M);
  const double t = x - c * h;
  return a_[c] + t * (b_[c] + t * (c_[c] + t * d_[c]));
}

double CubicSpline::delta_right(int node, double r) const {
  return r * (b_[node] + r * (c_[node] + r * d_[node]));
}

double CubicSpline::delta_left(int node, double r) const {
  // expansion of cell node-1 about its right end; C2 continuity gives the
  // same first and second coefficients as cell `node`
  return r * (-b_[node] + r * (c_[node] - r * d_[node - 1]));
}

double CubicSpline::second_difference(int node, double r) const {
  return r * r * (2.0 * c_[node] + r * (d_[node] - d_[node - 1]));
}

}  // namespace fracwell
