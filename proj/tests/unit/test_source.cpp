#include <doctest.h>

#include <cmath>
#include <random>

#include "fracwell/conditions.hpp"
#include "fracwell/errors.hpp"
#include "fracwell/source.hpp"

using namespace fracwell;
using doctest::Approx;

namespace {

SourceFamily two(double a, double b, double q1, double q2) {
  return SourceFamily::two_power([a](double) { return a; }, [b](double) { return b; },
                                 [q1](double) { return q1; }, [q2](double) { return q2; });
}

SourceFamily variable_two() {
  return SourceFamily::two_power([](double) { return 1.0; }, [](double) { return 1.0; },
                                 [](double x) { return 3.0 + 0.2 * x; },
                                 [](double x) { return 3.6 + 0.2 * x; });
}

}  // namespace

TEST_CASE("source values") {
  const auto f = SourceFamily::single_power(4.0);
  CHECK(f.f(0.3, 2.0) == Approx(8.0).epsilon(1e-15));
  CHECK(f.F(0.3, 2.0) == Approx(4.0).epsilon(1e-15));
  CHECK(two(1, 1, 3, 4).F(0.5, 1.0) == Approx(7.0 / 12.0).epsilon(1e-15));
  for (const auto& s : {f, two(1, 1, 3, 4), variable_two(), SourceFamily::zero()})
    CHECK(s.f(0.4, 0.0) == 0.0);
}

TEST_CASE("growth constants") {
  const auto g4 = growth_constants(SourceFamily::single_power(4.0));
  CHECK(g4.A == Approx(0.25).epsilon(1e-12));
  CHECK(g4.B == Approx(0.25).epsilon(1e-12));
  CHECK(growth_constants(two(1, 1, 3, 4)).B == Approx(7.0 / 12.0).epsilon(1e-12));

  // dense t-grid supremum, joined across |t| = 1 as in the definition
  const auto s = two(2.0, 0.5, 3.0, 5.0);
  const auto gc = growth_constants(s, 1e-3, 1e3);
  double sup = 0.0;
  for (int i = 0; i <= 60000; ++i) {
    const double t = std::pow(10.0, -3.0 + 6.0 * i / 60000.0);
    const double e = t >= 1.0 ? s.h2(0.5) : s.h1(0.5);
    sup = std::max(sup, s.F(0.5, t) / std::pow(t, e));
  }
  CHECK(std::abs(gc.A - sup) <= 1e-10);
  CHECK_THROWS_AS(growth_constants(s, 2.0, 3.0), DomainError);
}

TEST_CASE("blow-up exponent selection") {
  CHECK(select_alpha(SourceFamily::single_power(4.0), KernelFamily::power(3.0, 0.5)) == 3.0);
  CHECK(select_alpha(SourceFamily::single_power(4.0), KernelFamily::power(2.0, 0.5)) ==
        Approx(3.0));
  CHECK(select_alpha(SourceFamily::single_power(2.5), KernelFamily::power(2.0, 0.5)) ==
        Approx(2.25));
  CHECK_THROWS_AS(select_alpha(SourceFamily::zero(), KernelFamily::power(2.0, 0.5)),
                  ConditionViolation);
}

TEST_CASE("source invariants on samples") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> X(0.0, 1.0), T(-3.0, 3.0);
  for (const auto& s : {SourceFamily::single_power(3.0), two(2, 0.5, 3, 5), variable_two()}) {
    const auto gc = growth_constants(s);
    for (int i = 0; i < 1000; ++i) {
      const double x = X(rng), t = std::pow(10.0, T(rng));
      for (double u : {t, -t}) {
        CHECK(u * s.f(x, u) >= 0.0);
        CHECK(s.F(x, u) >= 0.0);
        const double tf = u * s.f(x, u), F = s.F(x, u);
        CHECK(s.h1(x) * F <= tf * (1 + 1e-12));
        CHECK(tf <= s.h2(x) * F * (1 + 1e-12));
        CHECK(s.f(x, u + 0.01 * t) >= s.f(x, u));
        if (t >= 1.0) {
          CHECK(std::abs(tf) <= s.h2(x) * gc.A * std::pow(t, s.h2(x)) * (1 + 1e-10));
          CHECK(tf >= gc.B * s.h1(x) * std::pow(t, s.h1(x)) * (1 - 1e-10));
        }
      }
    }
  }
}

TEST_CASE("source conditions on the variable two-power example") {
  const auto rep = check_structural_conditions(
      KernelFamily::power_variable([](double x, double y) { return 2.4 - 0.4 * std::abs(x - y); },
                                   0.3),
      variable_two());
  CHECK(rep.all_required_pass());
  for (const char* c : {"f0", "f1", "f2", "f3"}) CHECK_MESSAGE(rep.find(c)->pass, c);
  CHECK(rep.alpha == Approx(2.4));
}

TEST_CASE("zero source fails the source conditions") {
  const auto rep = check_structural_conditions(KernelFamily::power(2.0, 0.5), SourceFamily::zero());
  CHECK_FALSE(rep.all_required_pass());
  CHECK_FALSE(rep.find("f0")->pass);
}
