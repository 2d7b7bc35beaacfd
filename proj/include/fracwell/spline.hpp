#pragma once

#include <vector>

#include "fracwell/mesh.hpp"

namespace fracwell {

// Natural cubic spline through the nodal values of a grid function (boundary
// nodes included, both equal to zero). Used wherever a pointwise principal
// value is needed, since the P.V. of a kinked piecewise-linear function
// diverges for s >= 1/2.
class CubicSpline {
 public:
  explicit CubicSpline(const GridFunction& u);

  double operator()(double x) const;  // zero outside (0, L)
  double derivative(int node) const { return b_[node]; }

  // u(x_node + r) - u(x_node) for 0 <= r <= h, and the same to the left,
  // evaluated from the local polynomial without cancellation.
  double delta_right(int node, double r) const;
  double delta_left(int node, double r) const;
  // u(x+r) + u(x-r) - 2u(x) at an interior node, 0 <= r <= h.
  double second_difference(int node, double r) const;

  const Mesh1D& mesh() const { return mesh_; }

 private:
  Mesh1D mesh_;
  // cell c covers [x_c, x_{c+1}]: u = a + b t + c t^2 + d t^3, t = x - x_c
  std::vector<double> a_, b_, c_, d_;
};

}  // namespace fracwell
