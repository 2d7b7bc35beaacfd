#pragma once

// Reference computations for the test suite. These deliberately avoid the
// library's quadrature rules: they integrate in (distance, position)
// coordinates with Boost adaptive rules and exact piecewise differences.

#include <Eigen/Dense>
#include <vector>

#include "fracwell/mesh.hpp"
#include "fracwell/nfunction.hpp"
#include "fracwell/space.hpp"

namespace oracle {

double brute_modular(const fracwell::GridFunction& u, const fracwell::KernelFamily& family);
double brute_pairing(const fracwell::GridFunction& u, const fracwell::GridFunction& phi,
                     const fracwell::KernelFamily& family);
// Pointwise P.V. on the cubic spline of the nodal values, power kernels only.
fracwell::GridFunction brute_apply(const fracwell::GridFunction& u,
                                   const fracwell::KernelFamily& family);

// Exact semi-discrete solution of M c' = -K c.
struct LinearDecay {
  Eigen::VectorXd eigenvalues;  // ascending
  Eigen::MatrixXd modes;        // mass-orthonormal columns
  Eigen::VectorXd amplitudes;   // (u0, phi_j)
  double norm_sq(double t) const;
  Eigen::VectorXd state(double t) const;
};
LinearDecay linear_decay_oracle(const fracwell::NonlocalForm& form, const Eigen::VectorXd& c0);

}  // namespace oracle
