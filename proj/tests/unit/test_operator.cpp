#include <doctest.h>

#include <cmath>
#include <random>

#include "fracwell/operator.hpp"
#include "fracwell/spline.hpp"
#include "fracwell/variational.hpp"
#include "helpers.hpp"
#include "oracle.hpp"

using namespace fracwell;
using doctest::Approx;
using testing::random_smooth;

namespace {

Eigen::VectorXd random_vector(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  Eigen::VectorXd c(n);
  for (auto& v : c) v = d(rng);
  return c;
}

Eigen::VectorXd as_vector(const GridFunction& u) {
  return Eigen::Map<const Eigen::VectorXd>(u.values().data(), u.size());
}

}  // namespace

TEST_CASE("natural cubic spline") {
  const Mesh1D m(1.0, 31);
  const auto u = GridFunction::from(m, [](double x) { return std::sin(M_PI * x); });
  const CubicSpline s(u);
  for (int i = 0; i <= m.M + 1; ++i) CHECK(s(m.node(i)) == Approx(u.node_value(i)).epsilon(1e-14));
  CHECK(s(0.37) == Approx(std::sin(M_PI * 0.37)).epsilon(1e-5));
  const double r = 0.3 * m.h();
  CHECK(s.second_difference(10, r) ==
        Approx(s(m.node(10) + r) + s(m.node(10) - r) - 2 * s(m.node(10))).epsilon(1e-9));
  CHECK(s.delta_right(5, r) == Approx(s(m.node(5) + r) - s(m.node(5))).epsilon(1e-12));
}

TEST_CASE("apply_operator basics") {
  const Mesh1D m(1.0, 32);
  const auto f = KernelFamily::power(2.5, 0.5);
  const auto zero = apply_operator(GridFunction(m), f);
  for (int i = 0; i < m.M; ++i) CHECK(zero[i] == 0.0);
  std::mt19937_64 rng(1);
  const auto u = random_smooth(m, rng);
  const auto a = apply_operator(u, f), b = apply_operator(u * -1.0, f);
  for (int i = 0; i < m.M; ++i) CHECK(b[i] == -a[i]);
}

TEST_CASE("apply_operator on a hat matches the dense oracle in the interior third") {
  const Mesh1D m(1.0, 64);
  const auto f = KernelFamily::power(2.0, 0.4);
  const auto u = testing::hat(m);
  const auto a = apply_operator(u, f), b = oracle::brute_apply(u, f);
  double num = 0.0, den = 0.0;
  for (int i = m.M / 3; i < 2 * m.M / 3; ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  CHECK(num / den <= 1e-4);
}

TEST_CASE("residual and Jacobian of the linear system") {
  const Mesh1D m(1.0, 32);
  NonlocalForm form(m, KernelFamily::power(2.0, 0.5), SourceFamily::zero());
  const Eigen::MatrixXd& K = form.stiffness();
  CHECK((K - K.transpose()).cwiseAbs().rowwise().sum().maxCoeff() <= 1e-10);
  CHECK(assemble_residual(form, Eigen::VectorXd::Zero(32)).norm() == 0.0);
  std::mt19937_64 rng(6);
  const Eigen::VectorXd c = random_vector(32, rng);
  CHECK((assemble_residual(form, c) + K * c).norm() <= 1e-10 * (K * c).norm());
  const Eigen::MatrixXd J0 = assemble_jacobian(form, Eigen::VectorXd::Zero(32));
  CHECK((J0 + K).cwiseAbs().maxCoeff() <= 1e-10 * K.cwiseAbs().maxCoeff());
}

TEST_CASE("operator and weak pairing agree in the L2 sense under refinement") {
  const auto f = KernelFamily::power(2.0, 0.3);
  double prev = 1e300;
  for (int M : {15, 31, 63}) {
    const Mesh1D m(1.0, M);
    NonlocalForm form(m, f, SourceFamily::zero());
    const auto u = GridFunction::from(m, [](double x) { return std::sin(M_PI * x); });
    const Eigen::VectorXd c = form.space().coefficients(u);
    const Eigen::VectorXd lhs = form.space().mass() * as_vector(apply_operator(u, f));
    const Eigen::VectorXd rhs = form.pairing_gradient(c);
    const double err = (lhs - rhs).norm() / rhs.norm();
    INFO("M = " << M << " error " << err);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 0.05);
}

TEST_CASE("Jacobian matches finite differences and is symmetric") {
  const Mesh1D m(1.0, 24);
  NonlocalForm form(m, KernelFamily::power(2.5, 0.5), SourceFamily::single_power(3.5));
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 3; ++trial) {
    const Eigen::VectorXd c = random_vector(24, rng), w = random_vector(24, rng);
    const Eigen::MatrixXd J = assemble_jacobian(form, c);
    CHECK((J - J.transpose()).cwiseAbs().maxCoeff() <= 1e-8 * J.cwiseAbs().maxCoeff());
    const double eps = 1e-6 * c.norm() / w.norm();
    const Eigen::VectorXd fd =
        (assemble_residual(form, c + eps * w) - assemble_residual(form, c - eps * w)) / (2 * eps);
    CHECK((fd - J * w).norm() <= 1e-5 * (J * w).norm());
  }
}

TEST_CASE("residual is minus the energy gradient") {
  const Mesh1D m(1.0, 24);
  NonlocalForm form(m,
                    KernelFamily::power_variable(
                        [](double x, double y) { return 2.3 + 0.3 * std::abs(x - y); }, 0.4),
                    SourceFamily::single_power(3.0));
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::VectorXd c = random_vector(24, rng), w = random_vector(24, rng);
    const double eps = 1e-5;
    const double fd = (energy(form, c + eps * w) - energy(form, c - eps * w)) / (2 * eps);
    const double an = -assemble_residual(form, c).dot(w);
    CHECK(std::abs(fd - an) <= 1e-5 * std::abs(an));
  }
}

TEST_CASE("operator is monotone") {
  const Mesh1D m(1.0, 32);
  NonlocalForm form(m, KernelFamily::power(2.5, 0.4), SourceFamily::zero());
  const auto& f = form.family();
  std::mt19937_64 rng(23);
  int violations = 0;
  for (int i = 0; i < 100; ++i) {
    const auto u = random_smooth(m, rng), v = random_smooth(m, rng);
    const Eigen::VectorXd d = as_vector(apply_operator(u, f)) - as_vector(apply_operator(v, f));
    const Eigen::VectorXd e = as_vector(u) - as_vector(v);
    if (e.dot(form.space().mass() * d) < -1e-8) ++violations;
  }
  CHECK(violations == 0);
}
