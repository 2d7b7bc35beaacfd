#include <doctest.h>

#include <cmath>
#include <random>

#include "fracwell/errors.hpp"
#include "fracwell/space.hpp"
#include "helpers.hpp"
#include "oracle.hpp"

using namespace fracwell;
using doctest::Approx;
using testing::random_smooth;

TEST_CASE("mesh and grid functions") {
  const Mesh1D m(2.0, 9);
  CHECK(m.h() == Approx(0.2));
  CHECK(m.node(10) == Approx(2.0));
  const auto u = GridFunction::from(m, [](double x) { return x * (2.0 - x); });
  CHECK(u.node_value(0) == 0.0);
  CHECK(u.node_value(10) == 0.0);
  CHECK(u(0.3) == Approx(0.5 * (u[0] + u[1])));
  CHECK(u(-1.0) == 0.0);
  CHECK(u(2.5) == 0.0);
  std::stringstream ss;
  u.write_csv(ss);
  const auto back = GridFunction::read_csv(ss, m);
  for (int i = 0; i < m.M; ++i) CHECK(back[i] == u[i]);
  CHECK_THROWS_AS(Mesh1D(1.0, 2), ConfigError);
}

TEST_CASE("line modulars") {
  const Mesh1D m(1.0, 64);
  const double h = m.h();
  const auto p2 = KernelFamily::power(2.0, 0.5);
  const auto p3 = KernelFamily::power(3.0, 0.5);
  const GridFunction zero(m);
  CHECK(modular(zero, ModularKind::Ghat, &p2) == 0.0);
  CHECK(luxemburg_norm(zero, ModularKind::Ghat, &p2) == 0.0);

  // u = 2 inside; the boundary cells ramp to the zero trace
  const auto two = GridFunction::from(m, [](double) { return 2.0; });
  CHECK(modular(two, ModularKind::Ghat, &p2) == Approx(2.0 - 8.0 * h / 3.0).epsilon(1e-13));
  CHECK(luxemburg_norm(two, ModularKind::Ghat, &p2) ==
        Approx(std::sqrt(2.0 - 8.0 * h / 3.0)).epsilon(1e-10));
  const auto one = GridFunction::from(m, [](double) { return 1.0; });
  const double J3 = (1.0 - 2.0 * h) / 3.0 + h / 6.0;
  CHECK(luxemburg_norm(one, ModularKind::Ghat, &p3) == Approx(std::cbrt(J3)).epsilon(1e-10));

  // the continuum values are the fine-mesh limits
  const Mesh1D fine(1.0, 4095);
  CHECK(modular(GridFunction::from(fine, [](double) { return 2.0; }), ModularKind::Ghat, &p2) ==
        Approx(2.0).epsilon(1e-3));
  CHECK(luxemburg_norm(GridFunction::from(fine, [](double) { return 1.0; }), ModularKind::Ghat,
                       &p3) == Approx(std::pow(3.0, -1.0 / 3.0)).epsilon(1e-3));

  const auto src = SourceFamily::single_power(4.0);
  const auto x = GridFunction::from(m, [](double t) { return t; });
  const double exact = std::pow(1 - h, 5) / 5.0 + h * std::pow(1 - h, 4) / 5.0;
  CHECK(modular(x, ModularKind::Phi, nullptr, &src) == Approx(exact).epsilon(1e-12));
  CHECK(modular(GridFunction::from(fine, [](double t) { return t; }), ModularKind::Phi, nullptr,
                &src) == Approx(0.2).epsilon(1e-3));
}

TEST_CASE("Luxemburg norm is absolutely homogeneous") {
  const Mesh1D m(1.0, 32);
  std::mt19937_64 rng(4);
  const auto var = KernelFamily::power_variable(
      [](double x, double y) { return 2.4 - 0.4 * std::abs(x - y); }, 0.3);
  const auto dph = KernelFamily::double_phase(2.0, 3.5, [](double x, double) { return x; }, 0.5);
  for (const auto* f : {&var, &dph}) {
    const auto u = random_smooth(m, rng);
    const double n1 = luxemburg_norm(u, ModularKind::Ghat, f);
    for (double c : {-3.0, 0.1, 7.0})
      CHECK(luxemburg_norm(u * c, ModularKind::Ghat, f) == Approx(std::abs(c) * n1).epsilon(1e-9));
  }
}

TEST_CASE("norm and modular sandwich") {
  const Mesh1D m(1.0, 32);
  std::mt19937_64 rng(8);
  const auto f = KernelFamily::power_variable(
      [](double x, double y) { return 2.2 + 0.6 * x * y; }, 0.5);
  for (int i = 0; i < 100; ++i) {
    const auto u = random_smooth(m, rng) * std::pow(10.0, (i % 7) - 3.0);
    const double n = luxemburg_norm(u, ModularKind::Ghat, &f);
    const double J = modular(u, ModularKind::Ghat, &f);
    const double lo = std::min(std::pow(n, f.g_minus()), std::pow(n, f.g_plus()));
    const double hi = std::max(std::pow(n, f.g_minus()), std::pow(n, f.g_plus()));
    CHECK(lo <= J * (1 + 1e-9));
    CHECK(J <= hi * (1 + 1e-9));
  }
}

TEST_CASE("Hoelder inequality with the conjugate power") {
  const Mesh1D m(1.0, 32);
  std::mt19937_64 rng(21);
  int violations = 0;
  for (double p : {1.5, 2.0, 3.0}) {
    const auto G = KernelFamily::power(p, 0.5);
    const auto Gt = KernelFamily::power(p / (p - 1.0), 0.5);  // t^{p'}/p' is the conjugate
    for (int i = 0; i < 334; ++i) {
      const auto u = random_smooth(m, rng), v = random_smooth(m, rng);
      const double uv = 0.25 * (modular(u + v, ModularKind::L2) - modular(u - v, ModularKind::L2));
      const double bound = 2.0 * luxemburg_norm(u, ModularKind::Ghat, &G) *
                           luxemburg_norm(v, ModularKind::Ghat, &Gt);
      if (std::abs(uv) > bound * (1 + 1e-12)) ++violations;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("Gagliardo modular basics") {
  const Mesh1D m(1.0, 64);
  const auto p25 = KernelFamily::power(2.5, 0.5);
  CHECK(gagliardo_modular(GridFunction(m), p25) == 0.0);
  CHECK(gagliardo_seminorm(GridFunction(m), p25) == 0.0);
  const auto u = GridFunction::from(m, [](double x) { return std::sin(3.0 * x) * x * (1 - x); });
  CHECK(gagliardo_modular(u * 2.0, p25) ==
        Approx(std::pow(2.0, 2.5) * gagliardo_modular(u, p25)).epsilon(1e-13));
  CHECK(gagliardo_seminorm(u * 3.0, p25) ==
        Approx(3.0 * gagliardo_seminorm(u, p25)).epsilon(1e-9));
}

TEST_CASE("Gagliardo modular of a hat matches the dense oracle") {
  const Mesh1D m(1.0, 64);
  const auto f = KernelFamily::power(2.0, 0.4);
  const auto u = testing::hat(m);
  CHECK(testing::rel(gagliardo_modular(u, f), oracle::brute_modular(u, f)) <= 1e-4);
}

TEST_CASE("seminorm and pairing sandwiches") {
  const Mesh1D m(1.0, 32);
  const auto f = KernelFamily::power_variable(
      [](double x, double y) { return 2.2 + 0.5 * std::abs(x - y); }, 0.4);
  NonlocalForm form(m, f, SourceFamily::zero());
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    const auto u = random_smooth(m, rng) * std::pow(10.0, (i % 5) - 2.0);
    const auto v = form.values(form.space().coefficients(u));
    const double J = form.modular(v), s = form.seminorm(v), P = form.self_pairing(v);
    CHECK(std::min(std::pow(s, f.g_minus()), std::pow(s, f.g_plus())) <= J * (1 + 1e-9));
    CHECK(J <= std::max(std::pow(s, f.g_minus()), std::pow(s, f.g_plus())) * (1 + 1e-9));
    CHECK(f.g_minus() * J <= P * (1 + 1e-12));
    CHECK(P <= f.g_plus() * J * (1 + 1e-12));
  }
}

TEST_CASE("weak pairing") {
  const Mesh1D m(1.0, 32);
  const auto f = KernelFamily::power(2.0, 0.5);
  std::mt19937_64 rng(2);
  const auto u = random_smooth(m, rng), v = random_smooth(m, rng);
  CHECK(weak_pairing(u, GridFunction(m), f) == 0.0);
  const double a = weak_pairing(u, v, f), b = weak_pairing(v, u, f);
  CHECK(std::abs(a - b) <= 1e-10 * std::abs(a));
}

TEST_CASE("quadrature converges under refinement") {
  const auto f = KernelFamily::power(2.0, 0.4);
  auto J = [&](int M) {
    const Mesh1D m(1.0, M);
    return gagliardo_modular(
        GridFunction::from(m, [](double x) { return std::sin(M_PI * x) + 0.5 * x * (1 - x); }), f);
  };
  const double a = J(15), b = J(31), c = J(63);
  const double order = std::log2(std::abs(a - b) / std::abs(b - c));
  INFO("observed order " << order);
  CHECK(order >= 0.5);
}

TEST_CASE("embedding constants") {
  const auto f = KernelFamily::power(2.0, 0.5);
  const auto src = SourceFamily::single_power(3.0);
  const auto c64 = estimate_embedding_constants(Mesh1D(1.0, 64), f, src, 32);
  const auto c32 = estimate_embedding_constants(Mesh1D(1.0, 32), f, src, 32);
  for (double c : {c64.C_star, c64.C_1G, c64.C_star_G, c64.C_max}) CHECK(c > 0.0);
  CHECK(c64.C_star >= 0.95 * c32.C_star);
  CHECK(c64.C_1G >= 0.95 * c32.C_1G);

  // p = 2: the supremum of |u| / [u] is sqrt(2 / lambda_1), reached by the first mode
  NonlocalForm form(Mesh1D(1.0, 64), f, SourceFamily::zero());
  const auto lin = oracle::linear_decay_oracle(form, Eigen::VectorXd::Ones(64));
  const double exact = std::sqrt(2.0 / lin.eigenvalues[0]);
  CHECK(c64.C_star <= exact * (1 + 1e-9));
  CHECK(c64.C_star >= exact * (1 - 1e-3));
  std::mt19937_64 rng(30);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    Eigen::VectorXd c(64);
    for (auto& v : c) v = n(rng);
    CHECK(std::sqrt(form.l2_norm_sq(c)) / form.seminorm(c) <= c64.C_star);
  }
}
