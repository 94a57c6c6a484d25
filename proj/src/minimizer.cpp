#include "nls/minimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "nls/ansatz.hpp"
#include "nls/errors.hpp"
#include "nls/precondition.hpp"

namespace nls {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 50;

double j_value(const Field& w, const Nonlinearity& nl, double nu) {
  return -(kinetic_x1(w) + potential(w, nl) + nu * momentum(w));
}

double e_value(const Field& w, const Nonlinearity& nl) {
  return kinetic_x1(w) + kinetic_transverse(w) + potential(w, nl);
}

// int <i v_x1, v> for a perturbation vanishing on the Dirichlet nodes.
double momentum_quadratic(const Grid& grid, const ComplexArray& v) {
  const Field f{grid, v, 0.0};
  const ComplexArray dv = d_x1(f);
  const Quadrature q = quadrature(grid);
  double sum = 0.0;
  for (int i = 0; i < grid.n1; ++i)
    for (int k = 0; k < grid.n2; ++k) {
      const std::size_t n = grid.index(i, k);
      sum += q.weight(i, k) * -(dv[n] * std::conj(v[n])).imag();
    }
  return sum;
}

void axpy(ComplexArray& y, double a, const ComplexArray& x) {
  for (std::size_t n = 0; n < y.size(); ++n) y[n] += a * x[n];
}

class Clock {
 public:
  explicit Clock(double limit) : limit_(limit), start_(std::chrono::steady_clock::now()) {}
  bool expired() const {
    if (limit_ <= 0.0) return false;
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start_;
    return dt.count() > limit_;
  }

 private:
  double limit_;
  std::chrono::steady_clock::time_point start_;
};

void finalize(SolitonRecord& rec, const Nonlinearity& nl) {
  rec.report = evaluate(rec.field, nl, rec.nu);
  rec.residual_pde = pde_residual(rec.field, nl, rec.nu);
  rec.residual_poh = std::abs(rec.report.poh);
}

}  // namespace

void validate(const MinimizeConfig& cfg, int dim) {
  if (cfg.mode == Mode::kA) {
    if (dim < 4) throw DomainError("mode A requires N ≥ 4");
    if (!(cfg.constraint_value > 0.0)) throw ParameterError("mode A requires j > 0");
    check_speed(cfg.nu);
    if (!(cfg.nu > 0.0)) throw ParameterError("mode A requires 0 < nu < sqrt(2)");
  } else {
    if (dim < 3) throw DomainError("mode B requires N ≥ 3");
    if (!(cfg.constraint_value < 0.0)) throw ParameterError("mode B requires q < 0");
  }
  if (cfg.max_iters < 1) throw ParameterError("max_iters must be >= 1");
  if (!(cfg.step > 0.0)) throw ParameterError("step must be positive");
  if (!(cfg.tol_grad > 0.0) || !(cfg.tol_constraint > 0.0))
    throw ParameterError("tolerances must be positive");
  if (cfg.restore_every < 1) throw ParameterError("restore_every must be >= 1");
  if (cfg.check_every < 1) throw ParameterError("check_every must be >= 1");
}

nlohmann::json record_to_json(const SolitonRecord& r) {
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& t : r.trace)
    trace.push_back({t.iter, t.merit, t.constraint, t.step, t.residual, t.multiplier});
  return nlohmann::json{{"family", r.family},
                        {"nu", r.nu},
                        {"lambda0", r.lambda0},
                        {"multiplier", r.multiplier},
                        {"constraint_value", r.constraint_value},
                        {"objective", r.objective},
                        {"report", to_json(r.report)},
                        {"residual_pde", r.residual_pde},
                        {"residual_poh", r.residual_poh},
                        {"iterations", r.iterations},
                        {"converged", r.converged},
                        {"status", r.status},
                        {"trace", trace}};
}

SolitonRecord record_from_json(const nlohmann::json& j) {
  SolitonRecord r;
  r.family = j.at("family").get<std::string>();
  r.nu = j.at("nu").get<double>();
  r.lambda0 = j.at("lambda0").get<double>();
  r.multiplier = j.at("multiplier").get<double>();
  r.constraint_value = j.at("constraint_value").get<double>();
  r.objective = j.value("objective", 0.0);
  r.report = report_from_json(j.at("report"));
  r.residual_pde = j.at("residual_pde").get<double>();
  r.residual_poh = j.at("residual_poh").get<double>();
  r.iterations = j.at("iterations").get<int>();
  r.converged = j.at("converged").get<bool>();
  r.status = j.at("status").get<std::string>();
  for (const auto& t : j.value("trace", nlohmann::json::array()))
    r.trace.push_back({t.at(0).get<int>(), t.at(1).get<double>(), t.at(2).get<double>(),
                       t.at(3).get<double>(), t.at(4).get<double>(), t.at(5).get<double>()});
  return r;
}

SolitonRecord minimize_T_fixed_J(const Field& w0, const MinimizeConfig& cfg,
                                 const Nonlinearity& nl) {
  const int dim = w0.grid.dim;
  validate(cfg, dim);
  if (cfg.mode != Mode::kA) throw ParameterError("minimize_T_fixed_J needs mode A");
  const double j = cfg.constraint_value;
  const double nu = cfg.nu;
  const double expo_j = 1.0 / (dim - 1);

  Field w = w0;
  w.apply_boundary();
  {
    const double j0 = j_value(w, nl, nu);
    if (!(j0 > 0.0))
      throw ParameterError("minimize_T_fixed_J: initial field needs J > 0");
    if (std::abs(j0 - j) > cfg.tol_constraint * j)
      w = dilate(w, {1.0, std::pow(j / j0, expo_j)});
  }

  const Preconditioner pc(w.grid);
  SolitonRecord rec;
  rec.family = "J";
  rec.nu = nu;
  rec.constraint_value = j;
  rec.status = "max_iters reached";
  Clock clock(cfg.time_limit_s);

  double t_cur = kinetic_transverse(w);
  double alpha = cfg.step;
  double lambda = 0.0;
  double lambda_pc = -1.0;
  int since_restore = 0;
  int it = 0;
  for (; it < cfg.max_iters; ++it) {
    const Quadrature q = quadrature(w.grid);
    const ComplexArray gT = grad_T(w);
    const ComplexArray gJ = grad_J(w, nl, nu);
    const double gjj = inner(q, w.grid, gJ, gJ);
    const double gtj = inner(q, w.grid, gT, gJ);
    lambda = gjj > 0.0 ? gtj / gjj : 0.0;

    if (it % cfg.check_every == 0) {
      // Residual of (1/lambda) Lap_perp w + w_x1x1 - i nu w_x1 + G w, which is
      // -(gT - lambda gJ) / (2 lambda) at the free nodes.
      double res = -1.0;
      if (lambda > 0.0) {
        ComplexArray r = gT;
        axpy(r, -lambda, gJ);
        const double norm = std::sqrt(inner(q, w.grid, r, r)) / (2.0 * lambda);
        res = norm / std::sqrt(kinetic_x1(w) + t_cur / lambda);
      }
      if (cfg.keep_trace)
        rec.trace.push_back({it, t_cur, j_value(w, nl, nu), alpha, res, lambda});
      if (res >= 0.0 && res <= cfg.tol_grad) {
        rec.converged = true;
        rec.status = "converged";
        break;
      }
      if (clock.expired()) {
        rec.status = "time limit reached";
        break;
      }
    }
    // Metric a Ax + Arho + a: matches the constrained Hessian up to O(1).
    if (lambda > 0.0 && (lambda_pc < 0.0 || std::abs(lambda / lambda_pc - 1.0) > 0.2))
      lambda_pc = lambda;
    const double a = lambda_pc > 0.0 ? lambda_pc : 1.0;

    const ComplexArray pa = pc.apply(w.grid, gT, a, 1.0, a);
    const ComplexArray pb = pc.apply(w.grid, gJ, a, 1.0, a);
    const double mu = inner(q, w.grid, pa, gJ) / inner(q, w.grid, pb, gJ);
    ComplexArray d = pa;
    axpy(d, -mu, pb);
    const double slope = inner(q, w.grid, gT, d);
    if (!(slope > 0.0)) {
      rec.status = "no descent direction";
      break;
    }

    bool accepted = false;
    Field trial = w;
    double sigma = 1.0, t_trial = 0.0, j_trial = 0.0;
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      trial.values = w.values;
      axpy(trial.values, -alpha, d);
      j_trial = j_value(trial, nl, nu);
      if (!(j_trial > 0.0) || !std::isfinite(j_trial)) {
        alpha *= 0.5;
        continue;
      }
      sigma = std::pow(j / j_trial, expo_j);
      t_trial = std::pow(sigma, dim - 3) * kinetic_transverse(trial);
      if (t_trial <= t_cur - kArmijo * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      rec.status = "line search failed";
      break;
    }
    ++since_restore;
    const bool drift = std::abs(j_trial - j) > cfg.tol_constraint * j;
    if (since_restore >= cfg.restore_every || drift) {
      w = dilate(trial, {1.0, sigma});
      since_restore = 0;
    } else {
      w = std::move(trial);
    }
    t_cur = t_trial;
    alpha = std::min(alpha * 1.5, 4.0 * cfg.step);
  }
  if (since_restore > 0) w = dilate(w, {1.0, std::pow(j / j_value(w, nl, nu), expo_j)});

  rec.iterations = it;
  rec.objective = kinetic_transverse(w);
  rec.multiplier = lambda;
  if (rec.converged && !(lambda > 0.0)) {
    rec.converged = false;
    rec.status = "multiplier sign violation";
  }
  rec.lambda0 = lambda > 0.0 ? std::sqrt(lambda) : 1.0;
  rec.field = dilate(w, {1.0, rec.lambda0});
  finalize(rec, nl);
  return rec;
}

bool restore_momentum(Field& w, const ComplexArray& v, double q) {
  const Quadrature quad = quadrature(w.grid);
  const double p = momentum(w);
  const double lin = inner(quad, w.grid, grad_P(w), v);
  const double quadc = momentum_quadratic(w.grid, v);
  const double rhs = q - p;
  double s = 0.0;
  if (std::abs(quadc) * rhs * rhs <= 1e-14 * lin * lin * std::abs(rhs) + 1e-300) {
    if (lin == 0.0) return rhs == 0.0;
    s = rhs / lin;
  } else {
    const double disc = lin * lin + 4.0 * quadc * rhs;
    if (disc < 0.0) return false;
    const double root = std::sqrt(disc);
    s = 2.0 * rhs / (lin + (lin >= 0.0 ? root : -root));
  }
  axpy(w.values, s, v);
  return true;
}

Field prepare_initial_momentum(const Grid& grid, double q) {
  if (!(q < 0.0)) throw ParameterError("mode B requires q < 0");
  double best_r = -1.0, best_gap = 0.0;
  for (double r = 2.0; r + 4.0 <= std::min(grid.L1, grid.L2); r += 0.25) {
    const double gap = std::abs(momentum(make_wr(grid, r)) - q);
    if (best_r < 0.0 || gap < best_gap) {
      best_r = r;
      best_gap = gap;
    }
  }
  if (best_r < 0.0) throw ParameterError("prepare_initial_momentum: domain too small");
  Field w = make_wr(grid, best_r);
  const Preconditioner pc(grid);
  const ComplexArray v = pc.apply(grid, grad_P(w), 1.0, 1.0, 1.0);
  if (!restore_momentum(w, v, q)) {
    std::ostringstream os;
    os << "prepare_initial_momentum: cannot reach P = " << q << " from w_r, r = " << best_r;
    throw NumericError(os.str());
  }
  return w;
}

SolitonRecord minimize_E_fixed_P(const Field& w0, const MinimizeConfig& cfg,
                                 const Nonlinearity& nl) {
  validate(cfg, w0.grid.dim);
  if (cfg.mode != Mode::kB) throw ParameterError("minimize_E_fixed_P needs mode B");
  const double qv = cfg.constraint_value;

  Field w = w0;
  w.apply_boundary();
  const Preconditioner pc(w.grid);
  const Quadrature q = quadrature(w.grid);
  if (std::abs(momentum(w) - qv) > cfg.tol_constraint * std::abs(qv)) {
    const ComplexArray v = pc.apply(w.grid, grad_P(w), 1.0, 1.0, 1.0);
    if (!restore_momentum(w, v, qv))
      throw NumericError("minimize_E_fixed_P: initial field cannot reach P = q");
  }

  SolitonRecord rec;
  rec.family = "Q";
  rec.constraint_value = qv;
  rec.status = "max_iters reached";
  Clock clock(cfg.time_limit_s);

  double e_cur = e_value(w, nl);
  double alpha = cfg.step;
  double nu = 0.0;
  int it = 0;
  for (; it < cfg.max_iters; ++it) {
    const ComplexArray gE = grad_E(w, nl);
    const ComplexArray gP = grad_P(w);
    const double gpp = inner(q, w.grid, gP, gP);
    nu = gpp > 0.0 ? -inner(q, w.grid, gE, gP) / gpp : 0.0;

    if (it % cfg.check_every == 0) {
      ComplexArray r = gE;
      axpy(r, nu, gP);
      const double den = std::sqrt(kinetic_x1(w) + kinetic_transverse(w));
      const double res = 0.5 * std::sqrt(inner(q, w.grid, r, r)) / (den > 0.0 ? den : 1.0);
      if (cfg.keep_trace) rec.trace.push_back({it, e_cur, momentum(w), alpha, res, nu});
      if (res <= cfg.tol_grad) {
        rec.converged = true;
        rec.status = "converged";
        break;
      }
      if (clock.expired()) {
        rec.status = "time limit reached";
        break;
      }
    }

    const ComplexArray pa = pc.apply(w.grid, gE, 1.0, 1.0, 1.0);
    const ComplexArray pb = pc.apply(w.grid, gP, 1.0, 1.0, 1.0);
    const double mu = inner(q, w.grid, pa, gP) / inner(q, w.grid, pb, gP);
    ComplexArray d = pa;
    axpy(d, -mu, pb);
    const double slope = inner(q, w.grid, gE, d);
    if (!(slope > 0.0)) {
      rec.status = "no descent direction";
      break;
    }

    bool accepted = false;
    Field trial = w;
    double e_trial = 0.0;
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      trial.values = w.values;
      axpy(trial.values, -alpha, d);
      if (restore_momentum(trial, pb, qv)) {
        e_trial = e_value(trial, nl);
        if (e_trial <= e_cur - kArmijo * alpha * slope) {
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      rec.status = "line search failed";
      break;
    }
    w = std::move(trial);
    e_cur = e_trial;
    alpha = std::min(alpha * 1.5, 4.0 * cfg.step);
  }

  rec.iterations = it;
  rec.objective = e_cur;
  rec.multiplier = nu;
  rec.nu = nu;
  rec.field = std::move(w);
  rec.report = FunctionalReport{};
  if (rec.converged && !(nu > 0.0 && nu < std::sqrt(2.0))) {
    rec.converged = false;
    rec.status = "emergent speed outside (0, sqrt(2))";
  }
  // Functionals at the emergent speed; evaluate() rejects supersonic nu, so
  // clamp only for the report of a flagged record.
  const double nu_eval = std::clamp(nu, 0.0, std::nextafter(std::sqrt(2.0), 0.0));
  rec.report = evaluate(rec.field, nl, nu_eval);
  rec.report.nu = nu;
  rec.residual_pde = pde_residual(rec.field, nl, nu);
  rec.residual_poh = std::abs(rec.report.poh);
  return rec;
}

bool CertifyReport::pass() const {
  for (const auto& c : checks)
    if (c.applicable && !c.pass) return false;
  return true;
}

const CertifyCheck& CertifyReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw InputError("certify report: no entry " + name);
}

nlohmann::json to_json(const CertifyReport& r) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : r.checks)
    out.push_back({{"name", c.name},
                   {"applicable", c.applicable},
                   {"pass", c.pass},
                   {"residual", c.residual},
                   {"tolerance", c.tolerance},
                   {"detail", c.detail}});
  return nlohmann::json{{"pass", r.pass()}, {"checks", out}};
}

namespace {

CertifyCheck relative_check(std::string name, double lhs, double rhs, double tol) {
  CertifyCheck c;
  c.name = std::move(name);
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  c.residual = scale > 0.0 ? std::abs(lhs - rhs) / scale : 0.0;
  c.tolerance = tol;
  c.pass = c.residual <= tol;
  std::ostringstream os;
  os << "lhs=" << lhs << " rhs=" << rhs;
  c.detail = os.str();
  return c;
}

}  // namespace

CertifyReport certify(const SolitonRecord& record, const Nonlinearity& nl) {
  const Field& w = record.field;
  const int n = w.grid.dim;
  const double nu = record.nu;
  const double nu_eval = std::clamp(nu, 0.0, std::nextafter(std::sqrt(2.0), 0.0));
  const FunctionalReport r = evaluate(w, nl, nu_eval);
  const double p_term = nu * r.p;
  const double j = -(r.kinetic_x1 + r.potential + p_term);
  const double poh = static_cast<double>(n - 3) / (n - 1) * r.t - j;
  CertifyReport out;

  {
    CertifyCheck c;
  c.name = "pohozaev";
    c.residual = std::abs(poh);
    c.tolerance = 1e-2 * r.t;
    c.pass = c.residual <= c.tolerance;
    std::ostringstream os;
    os << "Poh=" << poh << " T=" << r.t;
    c.detail = os.str();
    out.checks.push_back(c);
  }
  {
    CertifyCheck c;
  c.name = "pohozaev2";
    const double a = (n - 2) * (r.kinetic_x1 + r.t);
    const double b = n * r.potential;
    const double d = (n - 1) * p_term;
    const double dominant = std::max({std::abs(a), std::abs(b), std::abs(d)});
    c.residual = std::abs(a + b + d);
    c.tolerance = 1e-2 * dominant;
    c.pass = c.residual <= c.tolerance;
    std::ostringstream os;
    os << "(N-2)|grad w|^2=" << a << " N V=" << b << " (N-1) nu P=" << d;
    c.detail = os.str();
    out.checks.push_back(c);
  }
  if (n >= 4) {
    out.checks.push_back(relative_check(
        "integral_v", r.potential, -0.5 * p_term - (n - 2) * j / (n - 3), 2e-2));
    out.checks.push_back(
        relative_check("integral_kx", r.kinetic_x1, -0.5 * p_term + j / (n - 3), 2e-2));
  } else {
    for (const char* name : {"integral_v", "integral_kx"}) {
      CertifyCheck c;
  c.name = name;
      c.applicable = false;
      c.detail = "requires N >= 4";
      out.checks.push_back(c);
    }
  }

  CertifyCheck la;
  la.name = "least_action";
  la.applicable = false;
  la.detail = "mode A records with N >= 4 only";
  if (record.family == "J" && n >= 4 && nu > 0.0) {
    Grid g = w.grid;
    g.L2 = g.L1;
    for (double R = 4.0; R + 4.0 <= g.L1 && !la.applicable; R += 1.0) {
      const Field cand = make_vortex_ring(g, R);
      if (!(evaluate(cand, nl, nu).j > 0.0)) continue;
      const auto [normalized, lam] = pohozaev_normalize(cand, nl, nu);
      const double s_cand = evaluate(normalized, nl, nu).s;
      la.applicable = true;
      la.residual = r.s - s_cand;
      la.tolerance = 1e-2 * std::abs(s_cand);
      la.pass = la.residual <= la.tolerance;
      std::ostringstream os;
      os << "S=" << r.s << " S(candidate R=" << R << ")=" << s_cand;
      la.detail = os.str();
    }
    if (!la.applicable) la.detail = "no vortex-ring candidate with J > 0";
  }
  out.checks.push_back(la);
  return out;
}

}  // namespace nls
