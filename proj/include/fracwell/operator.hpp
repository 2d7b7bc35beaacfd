#pragma once

#include <Eigen/Dense>
#include <iosfwd>

#include "fracwell/mesh.hpp"
#include "fracwell/nfunction.hpp"
#include "fracwell/space.hpp"

namespace fracwell {

struct ApplyOptions {
  int cell_order = 8;       // Gauss points per cell away from the node
  int near_order = 14;      // cells within three cells of the node
  int singular_panels = 8;  // geometric panels on the symmetric pair
  int singular_order = 12;
};

// Nodal values of 2 P.V. int g(x, y, D^s u) |x-y|^{-1-s} dy over the real
// line, u extended by zero. The factor 2 makes <apply_operator(u), phi>
// equal to the weak pairing. The principal value is taken on the natural
// cubic spline through the nodal values.
GridFunction apply_operator(const GridFunction& u, const KernelFamily& family,
                            ApplyOptions opts = {});

struct AssembledSystem {
  Eigen::VectorXd residual;  // F(c) = -(u, e_j)_W + (f(x,u), e_j)
  Eigen::MatrixXd jacobian;  // dF/dc
  Eigen::MatrixXd mass;      // (e_i, e_j)
};

Eigen::VectorXd assemble_residual(const NonlocalForm& form, const Eigen::VectorXd& c);
// g' is floored at eps for exponents below 2; the residual is never regularized.
Eigen::MatrixXd assemble_jacobian(const NonlocalForm& form, const Eigen::VectorXd& c,
                                  double eps = 1e-12);
AssembledSystem assemble_system(const NonlocalForm& form, const Eigen::VectorXd& c);

// Dense matrix dump, one row per line, %.17g.
void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m);

}  // namespace fracwell
