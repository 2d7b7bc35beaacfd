#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "oracle.hpp"

using namespace fracwell;
using doctest::Approx;

TEST_CASE("dense oracle basics") {
  const Mesh1D m(1.0, 16);
  const auto f = KernelFamily::power(2.5, 0.5);
  CHECK(oracle::brute_modular(GridFunction(m), f) == 0.0);
  const auto u = GridFunction::from(m, [](double x) { return std::sin(M_PI * x); });
  CHECK(oracle::brute_modular(u * 2.0, f) ==
        Approx(std::pow(2.0, 2.5) * oracle::brute_modular(u, f)).epsilon(1e-12));
  const auto a = oracle::brute_apply(GridFunction(m), f);
  for (int i = 0; i < m.M; ++i) CHECK(a[i] == 0.0);
}

TEST_CASE("linear decay oracle") {
  const Mesh1D m(1.0, 32);
  NonlocalForm form(m, KernelFamily::power(2.0, 0.5), SourceFamily::zero());
  const auto all = oracle::linear_decay_oracle(form, Eigen::VectorXd::Ones(32));
  for (int j = 0; j < all.eigenvalues.size(); ++j) CHECK(all.eigenvalues[j] > 0.0);
  const Eigen::VectorXd phi = all.modes.col(0);
  const auto one = oracle::linear_decay_oracle(form, phi);
  const double n0 = form.l2_norm_sq(phi);
  for (double t : {0.0, 0.1, 1.0})
    CHECK(one.norm_sq(t) == Approx(std::exp(-2 * all.eigenvalues[0] * t) * n0).epsilon(1e-10));
  CHECK((one.state(0.0) - phi).norm() <= 1e-10 * phi.norm());
}
