#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nls/ansatz.hpp"
#include "nls/errors.hpp"
#include "nls/minimizer.hpp"
#include "nls/precondition.hpp"

using namespace nls;

TEST_CASE("config validation") {
  MinimizeConfig a;
  CHECK_NOTHROW(validate(a, 4));
  CHECK_THROWS_AS(validate(a, 3), DomainError);
  a.constraint_value = 0.0;
  CHECK_THROWS_AS(validate(a, 4), ParameterError);
  a.constraint_value = 1.0;
  a.nu = 1.5;
  CHECK_THROWS_AS(validate(a, 4), ParameterError);
  a.nu = 0.0;
  CHECK_THROWS_AS(validate(a, 4), ParameterError);
  a.nu = 0.5;
  a.tol_grad = 0.0;
  CHECK_THROWS_AS(validate(a, 4), ParameterError);

  MinimizeConfig b;
  b.mode = Mode::kB;
  b.constraint_value = -10.0;
  CHECK_NOTHROW(validate(b, 3));
  b.constraint_value = 5.0;
  CHECK_THROWS_AS(validate(b, 3), ParameterError);
  b.constraint_value = -10.0;
  b.max_iters = 0;
  CHECK_THROWS_AS(validate(b, 3), ParameterError);
}

TEST_CASE("restore_momentum lands exactly on P = q") {
  const Grid g = Grid::make(3, 20.0, 20.0, 128, 64);
  Field w = make_wr(g, 6.0);
  const Preconditioner pc(g);
  const ComplexArray v = pc.apply(g, grad_P(w), 1.0, 1.0, 1.0);
  const double q = momentum(w) * 1.1;
  REQUIRE(restore_momentum(w, v, q));
  CHECK(momentum(w) == doctest::Approx(q).epsilon(1e-12));
  // A direction that does not move P admits no root; w is left untouched.
  const Field before = w;
  CHECK_FALSE(restore_momentum(w, ComplexArray(g.size(), 0.0), q - 1.0));
  CHECK(w.values == before.values);
}

TEST_CASE("mode A on a coarse grid converges and rescales to a traveling wave") {
  const Nonlinearity gp = make_gp();
  const Grid g = Grid::make(4, 20.0, 20.0, 96, 64);
  MinimizeConfig cfg;
  cfg.constraint_value = 1.0;
  cfg.nu = 0.5;
  cfg.time_limit_s = 200.0;
  const SolitonRecord r = minimize_T_fixed_J(prepare_initial(g, 1.0, gp, 0.5).field, cfg, gp);
  REQUIRE(r.converged);
  CHECK(r.multiplier > 0.0);
  CHECK(r.lambda0 == doctest::Approx(std::sqrt(r.multiplier)).epsilon(1e-12));
  CHECK(r.family == "J");
  CHECK(r.residual_pde <= 1e-3);
  CHECK(r.residual_poh <= 1e-2 * r.report.t);
  // The returned field is the minimizer dilated by lambda0, so its J is
  // lambda0^{N-1} times the constraint value.
  CHECK(r.report.j == doctest::Approx(std::pow(r.lambda0, 3)).epsilon(1e-6));
  CHECK(certify(r, gp).find("pohozaev").pass);

  SUBCASE("gauge: a rotated seed gives the rotated minimizer") {
    Field seed = prepare_initial(g, 1.0, gp, 0.5).field;
    const double alpha = 0.7;
    for (auto& z : seed.values) z *= std::polar(1.0, alpha);
    seed.boundary_phase = alpha;
    const SolitonRecord s = minimize_T_fixed_J(seed, cfg, gp);
    REQUIRE(s.converged);
    double diff = 0.0;
    for (std::size_t n = 0; n < s.field.values.size(); ++n)
      diff = std::max(diff, std::abs(s.field.values[n] * std::polar(1.0, -alpha) -
                                     r.field.values[n]));
    CHECK(diff <= 1e-6);
    CHECK(s.report.t == doctest::Approx(r.report.t).epsilon(1e-8));
  }
}

TEST_CASE("certify") {
  const Nonlinearity gp = make_gp();
  SUBCASE("a constant record satisfies every identity trivially") {
    SolitonRecord r;
    r.field = Field::constant(Grid::make(4, 10.0, 10.0, 33, 25));
    r.nu = 0.5;
    r.family = "Q";
    const CertifyReport c = certify(r, gp);
    CHECK(c.pass());
    CHECK(c.find("pohozaev").residual == 0.0);
    CHECK(c.find("integral_v").residual == 0.0);
    CHECK_FALSE(c.find("least_action").applicable);
  }
  SUBCASE("an off-shell dilation of a Pohozaev-normalized field fails") {
    const Grid g = Grid::make(4, 20.0, 20.0, 96, 64);
    const Field seed = prepare_initial(g, 1.0, gp, 0.5).field;
    SolitonRecord r;
    r.field = dilate(pohozaev_normalize(seed, gp, 0.5).first, {1.0, 2.0});
    r.nu = 0.5;
    r.family = "Q";
    const CertifyReport c = certify(r, gp);
    CHECK_FALSE(c.find("pohozaev").pass);
    CHECK(c.find("pohozaev").residual > 0.0);
    CHECK_FALSE(c.pass());
  }
  SUBCASE("N = 3 has no integral identities") {
    SolitonRecord r;
    r.field = Field::constant(Grid::make(3, 10.0, 10.0, 33, 25));
    r.nu = 0.5;
    CHECK_FALSE(certify(r, gp).find("integral_v").applicable);
  }
  CHECK_THROWS(CertifyReport{}.find("missing"));
}

TEST_CASE("record JSON round trip") {
  SolitonRecord r;
  r.field = Field::constant(Grid::make(4, 10.0, 10.0, 17, 9));
  r.nu = 0.5;
  r.family = "J";
  r.lambda0 = 3.25;
  r.multiplier = 10.5625;
  r.constraint_value = 2.0;
  r.objective = 123.456;
  r.report = evaluate(r.field, make_gp(), 0.5);
  r.residual_pde = 1e-5;
  r.residual_poh = 0.25;
  r.iterations = 77;
  r.converged = true;
  r.status = "converged";
  r.trace.push_back({1, 2.0, 3.0, 0.5, -1.0, 4.0});
  const SolitonRecord b = record_from_json(record_to_json(r));
  CHECK(b.nu == r.nu);
  CHECK(b.family == r.family);
  CHECK(b.lambda0 == r.lambda0);
  CHECK(b.multiplier == r.multiplier);
  CHECK(b.constraint_value == r.constraint_value);
  CHECK(b.objective == r.objective);
  CHECK(b.residual_pde == r.residual_pde);
  CHECK(b.iterations == r.iterations);
  CHECK(b.converged);
  CHECK(b.status == "converged");
  REQUIRE(b.trace.size() == 1);
  CHECK(b.trace[0].multiplier == 4.0);
}
