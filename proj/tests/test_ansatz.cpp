#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "nls/ansatz.hpp"
#include "nls/checks.hpp"
#include "nls/errors.hpp"
#include "nls/functionals.hpp"

using namespace nls;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace

TEST_CASE("dilate rescales the grid only") {
  std::mt19937_64 rng(21);
  const Grid g = Grid::make(4, 6.0, 5.0, 41, 31);
  const Field w = random_smooth_field(g, rng, 0.8);
  const Field same = dilate(w, {1.0, 1.0});
  const Nonlinearity gp = make_gp();
  CHECK(evaluate(same, gp, 0.5).e == evaluate(w, gp, 0.5).e);
  const Field d = dilate(w, {2.0, 0.5});
  CHECK(d.grid.L1 == 12.0);
  CHECK(d.grid.L2 == 2.5);
  CHECK(d.values == w.values);
  CHECK_THROWS_AS(dilate(w, {0.0, 1.0}), ParameterError);
  CHECK_THROWS_AS(dilate(w, {1.0, -2.0}), ParameterError);
  CHECK_THROWS_AS(dilate(w, {1.0, INFINITY}), ParameterError);
}

TEST_CASE("transverse dilation laws hold to rounding") {
  std::mt19937_64 rng(22);
  const Nonlinearity gp = make_gp();
  for (int dim : {3, 4, 5}) {
    const Grid g = Grid::make(dim, 6.0, 6.0, 41, 31);
    const Field w = random_smooth_field(g, rng, 0.8);
    const FunctionalReport r = evaluate(w, gp, 0.5);
    for (double s : {0.5, 2.0}) {
      const FunctionalReport d = evaluate(dilate(w, {1.0, s}), gp, 0.5);
      CHECK(rel(d.t, std::pow(s, dim - 3) * r.t) <= 1e-12);
      CHECK(rel(d.j, std::pow(s, dim - 1) * r.j) <= 1e-12);
      CHECK(rel(d.e_mod - d.t, std::pow(s, dim - 1) * (r.e_mod - r.t)) <= 1e-12);
    }
    // Isotropic: every term of E_Mod scales by s^{N-2} or s^N.
    const FunctionalReport iso = evaluate(dilate(w, {2.0, 2.0}), gp, 0.5);
    CHECK(rel(iso.kinetic_x1 + iso.t, std::pow(2.0, dim - 2) * (r.kinetic_x1 + r.t)) <= 1e-12);
  }
}

TEST_CASE("x1 dilation, N = 4, lambda = 2: T doubles, int |w_x1|^2 quadruples") {
  std::mt19937_64 rng(23);
  const Grid g = Grid::make(4, 6.0, 6.0, 41, 31);
  const Field w = random_smooth_field(g, rng, 0.8);
  const Field d = dilate(w, {2.0, 1.0});
  CHECK(rel(kinetic_transverse(d), 2.0 * kinetic_transverse(w)) <= 1e-12);
  // lambda^{N-1} / lambda^2 = 2 for N = 4.
  CHECK(rel(kinetic_x1(d), 0.5 * kinetic_x1(w)) <= 1e-12);
}

TEST_CASE("w_r: unit modulus away from the core torus and the momentum bracket") {
  const Grid g = Grid::make(3, 20.0, 20.0, 256, 128);
  const double r = 6.0;
  const Field w = make_wr(g, r);
  for (int i = 0; i < g.n1; ++i)
    for (int k = 0; k < g.n2; ++k)
      if (std::hypot(g.x1(i), g.rho(k) - r) >= 2.0) REQUIRE(std::abs(w.at(i, k)) == doctest::Approx(1.0));
  // 2 pi omega_2 = 2 pi^2.
  const double c = 2.0 * std::numbers::pi * std::numbers::pi;
  const double p = momentum(w);
  CHECK(p >= -c * r * r * 1.02);
  CHECK(p <= -c * (r - 2) * (r - 2) * 0.98);
  CHECK(p >= -710.6 * 1.02);
  CHECK(p <= -315.8 * 0.98);
  CHECK_THROWS_AS(make_wr(g, 1.5), ParameterError);
  CHECK_THROWS_AS(make_wr(g, 17.0), ParameterError);
}

TEST_CASE("ring cutoff") {
  CHECK(ring_cutoff(-1.0) == 0.0);
  CHECK(ring_cutoff(0.5) == 0.0);
  CHECK(ring_cutoff(2.0) == 1.0);
  for (double x = -1.0; x <= 3.0; x += 0.001) {
    const double d = (ring_cutoff(x + 1e-6) - ring_cutoff(x - 1e-6)) / 2e-6;
    REQUIRE(d >= -1e-9);
    REQUIRE(d <= 2.0 + 1e-6);
  }
}

TEST_CASE("ring flow phase: 2 pi jump across the disc, continuous outside it") {
  for (int dim : {3, 4, 5}) {
    const double R = 5.0, e = 1e-7;
    const double jump = ring_flow_phase(dim, R, -e, 2.0) - ring_flow_phase(dim, R, e, 2.0);
    CHECK(jump == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-5));
    const double outside = ring_flow_phase(dim, R, -e, 8.0) - ring_flow_phase(dim, R, e, 8.0);
    CHECK(std::abs(outside) < 1e-5);
    // Across the cylinder wall rho = R the two quadrature branches agree.
    CHECK(ring_flow_phase(dim, R, 1.0, R - 1e-9) ==
          doctest::Approx(ring_flow_phase(dim, R, 1.0, R + 1e-9)).epsilon(1e-6));
    // Odd in x1.
    CHECK(ring_flow_phase(dim, R, 1.3, 2.0) == doctest::Approx(-ring_flow_phase(dim, R, -1.3, 2.0)));
  }
}

TEST_CASE("ring flow phase N = 3 matches the solid angle of the disc on the axis") {
  // On the axis the double-layer potential of a disc is the solid angle
  // 2 pi (1 - x / sqrt(x^2 + R^2)), normalized by 4 pi.
  const double R = 3.0;
  for (double x : {0.5, 1.0, 4.0}) {
    const double omega = 2.0 * std::numbers::pi * (1.0 - x / std::hypot(x, R));
    CHECK(ring_flow_phase(3, R, x, 0.0) == doctest::Approx(-omega / 2.0).epsilon(1e-8));
  }
}

TEST_CASE("prepare_initial lands on J = j and scales exactly") {
  const Nonlinearity gp = make_gp();
  const Grid g = Grid::make(4, 20.0, 20.0, 128, 96);
  const PreparedSeed a = prepare_initial(g, 1.0, gp, 0.5);
  CHECK(rel(evaluate(a.field, gp, 0.5).j, 1.0) <= 1e-10);
  CHECK_FALSE(a.samples.empty());
  const PreparedSeed again = prepare_initial(g, 1.0, gp, 0.5);
  CHECK(again.field.values == a.field.values);
  CHECK(again.field.grid == a.field.grid);
  const PreparedSeed b = prepare_initial(g, 2.0, gp, 0.5);
  CHECK(b.field.values == a.field.values);
  CHECK(b.field.grid.L2 / a.field.grid.L2 == doctest::Approx(std::cbrt(2.0)).epsilon(1e-14));

  CHECK_THROWS_AS(prepare_initial(Grid::make(3, 20, 20, 64, 32), 1.0, gp, 0.5), DomainError);
  CHECK_THROWS_AS(prepare_initial(g, -1.0, gp, 0.5), ParameterError);
  CHECK_THROWS_AS(prepare_initial(g, 1.0, gp, 1.5), ParameterError);
  // A grid too small for any seed reports its samples.
  PrepareOptions no_ring;
  no_ring.allow_vortex_ring = false;
  CHECK_THROWS_AS(prepare_initial(Grid::make(4, 10, 10, 64, 48), 1.0, gp, 0.5, no_ring),
                  NumericError);
}

TEST_CASE("pohozaev_normalize") {
  const Nonlinearity gp = make_gp();
  const Grid g = Grid::make(5, 20.0, 20.0, 128, 96);
  // In N = 5 the seeds reach J > 0 only at larger speeds.
  const double nu = 1.0;
  const PreparedSeed seed = prepare_initial(g, 1.0, gp, nu);
  const FunctionalReport r = evaluate(seed.field, gp, nu);
  REQUIRE(r.j > 0.0);
  // Dilate to T = J: sigma^2 T = sigma^4 J.
  const Field tj = dilate(seed.field, {1.0, std::sqrt(r.t / r.j)});
  const FunctionalReport rtj = evaluate(tj, gp, nu);
  CHECK(rel(rtj.t, rtj.j) <= 1e-12);
  const auto [u, lam] = pohozaev_normalize(tj, gp, nu);
  CHECK(lam == doctest::Approx(std::sqrt(2.0 / 4.0)).epsilon(1e-12));
  const FunctionalReport ru = evaluate(u, gp, nu);
  CHECK(std::abs(ru.poh) <= 1e-10 * ru.t);
  CHECK(rel(ru.s, 2.0 / 4.0 * ru.t) <= 1e-10);
  const auto [u2, lam2] = pohozaev_normalize(u, gp, nu);
  CHECK(lam2 == doctest::Approx(1.0).epsilon(1e-10));

  CHECK_THROWS_AS(pohozaev_normalize(Field::constant(g), gp, nu), DomainError);
  CHECK_THROWS_AS(pohozaev_normalize(Field::constant(Grid::make(3, 5, 5, 16, 16)), gp, nu),
                  DomainError);
}

TEST_CASE("Poh(w_{1,lambda}) has a single positive zero, rising then falling") {
  const Nonlinearity gp = make_gp();
  const Grid g = Grid::make(4, 20.0, 20.0, 128, 96);
  const Field w = prepare_initial(g, 1.0, gp, 0.5).field;
  const double lw = pohozaev_normalize(w, gp, 0.5).second;
  std::vector<double> poh;
  for (int n = -40; n <= 40; ++n) {
    const double lam = lw * std::pow(10.0, n / 20.0);
    poh.push_back(evaluate(dilate(w, {1.0, lam}), gp, 0.5).poh);
  }
  int sign_changes = 0;
  for (std::size_t i = 1; i < poh.size(); ++i) sign_changes += (poh[i] > 0) != (poh[i - 1] > 0);
  CHECK(sign_changes == 1);
  const auto peak = std::max_element(poh.begin(), poh.end()) - poh.begin();
  for (long i = 1; i <= peak; ++i) CHECK(poh[i] > poh[i - 1]);
  for (std::size_t i = peak + 1; i < poh.size(); ++i) CHECK(poh[i] < poh[i - 1]);
}
