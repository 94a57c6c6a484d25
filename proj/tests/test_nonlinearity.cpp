#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "nls/errors.hpp"
#include "nls/nonlinearity.hpp"

using namespace nls;

TEST_CASE("theta pinned values and oddness") {
  CHECK(theta(1.0) == 1.0);
  CHECK(theta(2.0) == 2.0);
  CHECK(theta(6.0) == 3.0);
  CHECK(theta(-6.0) == -3.0);
  CHECK(theta(4.0) == 3.0);
  const double t3 = theta(3.0);
  CHECK(t3 > 2.5);
  CHECK(t3 < 3.0);
  // Theta'(3 + t) = 1 - Theta'(3 - t), so Theta(3) = 3 - 2 int_0^{1/2} S.
  using boost::math::quadrature::gauss_kronrod;
  const double half = gauss_kronrod<double, 61>::integrate(
      [](double u) { return smooth_step(u); }, 0.0, 0.5, 15, 1e-15);
  CHECK(t3 == doctest::Approx(3.0 - 2.0 * half).epsilon(1e-13));
}

TEST_CASE("theta is monotone, 1-Lipschitz and theta_prime lies in [0, 1]") {
  double prev = theta(-5.0);
  for (int n = 1; n <= 10000; ++n) {
    const double x = -5.0 + 10.0 * n / 10000.0;
    const double t = theta(x), tp = theta_prime(x);
    REQUIRE(tp >= 0.0);
    REQUIRE(tp <= 1.0);
    REQUIRE(t >= prev);
    REQUIRE(t - prev <= 10.0 / 10000.0 + 1e-15);
    REQUIRE(theta(-x) == -t);
    prev = t;
  }
}

TEST_CASE("theta_prime is the derivative of theta") {
  // Independent oracle: adaptive quadrature of theta_prime from 2.
  using boost::math::quadrature::gauss_kronrod;
  for (double x : {2.1, 2.5, 3.0, 3.3, 3.9, 3.999}) {
    const double integral = gauss_kronrod<double, 61>::integrate(theta_prime, 2.0, x, 15, 1e-14);
    CHECK(theta(x) == doctest::Approx(2.0 + integral).epsilon(1e-12));
    const double h = 1e-5;
    CHECK((theta(x + h) - theta(x - h)) / (2 * h) ==
          doctest::Approx(theta_prime(x)).epsilon(1e-6));
  }
}

TEST_CASE("smooth step") {
  CHECK(smooth_step(-1.0) == 0.0);
  CHECK(smooth_step(2.0) == 1.0);
  CHECK(smooth_step(0.5) == doctest::Approx(0.5));
  for (double u = 0.01; u < 1.0; u += 0.01) {
    CHECK(smooth_step(u) + smooth_step(1.0 - u) == doctest::Approx(1.0));
    CHECK(smooth_step_prime(u) <= 2.0);
  }
}

TEST_CASE("gp and cubic-quintic instances") {
  const Nonlinearity gp = make_gp();
  CHECK(gp.v(0.0) == doctest::Approx(0.5));
  CHECK(gp.g(1.0) == 0.0);
  CHECK(gp.v(1.0) == 0.0);
  for (double s = 0.0; s <= 4.0; s += 0.25) CHECK(gp.v(s) == doctest::Approx(0.5 * (1 - s) * (1 - s)));

  const Nonlinearity cq = make_cubic_quintic(1.0);
  REQUIRE(cq.params().size() == 3);
  CHECK(cq.params()[0] == 1.0);
  CHECK(cq.params()[1] == 3.0);
  CHECK(cq.params()[2] == 2.0);
  for (double x : {0.0, 0.3, 0.5, 1.0, 2.0}) CHECK(cq.g(x) == doctest::Approx(-(2 * x - 1) * (x - 1)));
  CHECK(cq.g(0.5) == doctest::Approx(0.0));
  CHECK(cq.v(1.0) == 0.0);
  CHECK_THROWS_AS(make_cubic_quintic(0.0), ParameterError);
  CHECK_THROWS_AS(make_cubic_quintic(-2.0), ParameterError);
}

TEST_CASE("v' = -g by central differences on [0, 4]") {
  for (const Nonlinearity& nl : {make_gp(), make_cubic_quintic(0.7)}) {
    for (double s = 0.05; s <= 4.0; s += 0.05) {
      const double h = 1e-5;
      CHECK((nl.v(s + h) - nl.v(s - h)) / (2 * h) == doctest::Approx(-nl.g(s)).epsilon(1e-6));
      CHECK(nl.g_prime(s) ==
            doctest::Approx((nl.g(s + h) - nl.g(s - h)) / (2 * h)).epsilon(1e-6));
    }
  }
}

TEST_CASE("assumption checker") {
  const auto gp4 = check_assumptions(make_gp(), 4);
  CHECK(gp4.ass1());
  // Cubic growth is critical in N = 4; existence there rests on Ass3.
  CHECK_FALSE(gp4.ass2());
  CHECK(gp4.ass3());
  CHECK(check_assumptions(make_gp(), 3).ass2());
  CHECK(check_assumptions(make_cubic_quintic(1.0), 4).ass1());
  const auto broken = check_assumptions(make_polynomial("1-s^2", {1.0, 0.0, -1.0}), 4);
  CHECK_FALSE(broken.ass1());
  // Quintic growth violates the subcritical exponent in N = 4 (p0 = 2 >= 1).
  CHECK_FALSE(check_assumptions(make_cubic_quintic(1.0), 4).ass2());
  CHECK_THROWS_AS(check_assumptions(make_gp(), 2), ParameterError);
  const auto unclaimed = check_assumptions(make_polynomial("p", {1.0, -1.0}), 3);
  CHECK_FALSE(unclaimed.find("Ass3").checked);
}

TEST_CASE("v_mod") {
  CHECK(v_mod(1.0) == 0.0);
  CHECK(v_mod(0.0) == 1.0);
  CHECK(v_mod(10.0) == 64.0);
  // GP: V(|w|^2) = (Theta^2 - 1)^2 / 2 for |w| <= 2.
  const Nonlinearity gp = make_gp();
  for (double a = 0.0; a <= 2.0; a += 0.01) CHECK(gp.v(a * a) == doctest::Approx(0.5 * v_mod(a)));
}

TEST_CASE("Taylor control of V near the unit circle") {
  // |V(s) - (s-1)^2/2| <= eps (s-1)^2 when | sqrt(s) - 1 | <= delta; for the
  // cubic-quintic V - (s-1)^2/2 = O((s-1)^3), delta = 0.02 suffices at eps = 0.1.
  const double eps = 0.1, delta = 0.02;
  for (const Nonlinearity& nl : {make_gp(), make_cubic_quintic(1.0), make_cubic_quintic(3.0)}) {
    for (int n = -100; n <= 100; ++n) {
      const double a = 1.0 + delta * n / 100.0;
      const double s = a * a;
      CHECK(std::abs(nl.v(s) - 0.5 * (s - 1) * (s - 1)) <= eps * (s - 1) * (s - 1) + 1e-15);
    }
  }
}
