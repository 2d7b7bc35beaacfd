#include "fracwell/operator.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "fracwell/errors.hpp"
#include "fracwell/quadrature.hpp"
#include "fracwell/spline.hpp"

namespace fracwell {

namespace {

bool same_kernel(const LocalKernel& a, const LocalKernel& b) {
  return a.kind == b.kind && a.p == b.p && a.q == b.q && a.a == b.a && a.scalar == b.scalar;
}

// g_r(a) + g_l(b) where a + b is known accurately and may be much smaller
// than |a|, |b|.
double odd_sum(const LocalKernel& kr, const LocalKernel& kl, double a, double b, double sum) {
  if (kr.kind == LocalKernel::Kind::Power && kr.p == 2.0 && same_kernel(kr, kl)) return sum;
  const double scale = std::max(std::abs(a), std::abs(b));
  if (same_kernel(kr, kl) && std::abs(sum) <= 1e-4 * scale) {
    const double mid = 0.5 * (a - b);
    if (mid != 0.0) return kr.g_prime(mid) * sum;
  }
  return kr.g(a) + kl.g(b);
}

}  // namespace

GridFunction apply_operator(const GridFunction& u, const KernelFamily& family,
                            ApplyOptions opts) {
  const Mesh1D& mesh = u.mesh();
  const double h = mesh.h();
  const double L = mesh.L;
  const double s = family.s();
  const int M = mesh.M;
  const CubicSpline sp(u);
  const GaussRule& gc = gauss_legendre(opts.cell_order);
  const GaussRule& gn = gauss_legendre(opts.near_order);
  const double a_min = std::max(family.g_minus() * (1.0 - s), 0.05);

  std::vector<double> out(M, 0.0);
  for (int i = 1; i <= M; ++i) {
    const double x = mesh.node(i);
    const double ux = u.node_value(i);
    // symmetric pair of adjacent cells: y = x + r and y = x - r
    const bool uniform = family.homogeneous();
    const LocalKernel k0 = family.local(x, x);
    auto pair = [&](double r) {
      const double rs = std::pow(r, -s);
      const double a = -sp.delta_right(i, r) * rs;
      const double b = -sp.delta_left(i, r) * rs;
      const double sum = -sp.second_difference(i, r) * rs;
      const LocalKernel kr = uniform ? k0 : family.local(x, x + r);
      const LocalKernel kl = uniform ? k0 : family.local(x, x - r);
      return odd_sum(kr, kl, a, b, sum) * rs / r;
    };
    double acc = integrate_singular_left(pair, h, a_min, opts.singular_panels, opts.singular_order);
    // remaining cells inside Omega
    for (int c = 0; c <= M; ++c) {
      if (c == i - 1 || c == i) continue;
      const int dist = c < i ? i - 1 - c : c - i;
      const GaussRule& g = dist <= 3 ? gn : gc;
      double cell = 0.0;
      for (int q = 0; q < g.size(); ++q) {
        const double y = (c + g.nodes[q]) * h;
        const double r = std::abs(x - y);
        const double rs = std::pow(r, -s);
        cell += g.weights[q] * family.local(x, y).g((ux - sp(y)) * rs) * rs / r;
      }
      acc += cell * h;
    }
    acc *= 2.0;
    // exterior, closed form in y: (2/s) [G(u x^{-s}) + G(u (L-x)^{-s})] / u
    if (ux != 0.0) {
      const double au = std::abs(ux);
      acc += 2.0 / s *
             (family.local(x, 0.0).G(au * std::pow(x, -s)) +
              family.local(x, L).G(au * std::pow(L - x, -s))) /
             ux;
    }
    if (!std::isfinite(acc))
      throw NumericError("apply_operator: non-finite value at node " + std::to_string(i));
    out[i - 1] = acc;
  }
  return GridFunction(mesh, std::move(out));
}

Eigen::VectorXd assemble_residual(const NonlocalForm& form, const Eigen::VectorXd& c) {
  Eigen::VectorXd r = -form.pairing_gradient(c);
  if (!form.source().is_zero()) r += form.source_vector(c);
  return r;
}

Eigen::MatrixXd assemble_jacobian(const NonlocalForm& form, const Eigen::VectorXd& c,
                                  double eps) {
  Eigen::MatrixXd J = -form.pairing_hessian(c, eps);
  if (!form.source().is_zero()) J += form.source_jacobian(c);
  return J;
}

AssembledSystem assemble_system(const NonlocalForm& form, const Eigen::VectorXd& c) {
  return {assemble_residual(form, c), assemble_jacobian(form, c), form.space().mass()};
}

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m) {
  char buf[32];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      os << (j ? "," : "") << buf;
    }
    os << '\n';
  }
}

}  // namespace fracwell
