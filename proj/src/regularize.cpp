#include "nls/regularize.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nls/errors.hpp"
#include "nls/precondition.hpp"

namespace nls {

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kSlack = 1e-12;
constexpr double kStall = 0.99;

using Mask = std::vector<char>;

Mask free_mask(const Grid& g, const Box& box) {
  Mask m(g.size(), 0);
  for (int i = 1; i + 1 < g.n1; ++i)
    for (int k = 0; k + 1 < g.n2; ++k) {
      bool in = true;
      if (!box.empty()) {
        in = i > box.i0 && i < box.i1 && k < box.k1 && (box.k0 == 0 || k > box.k0);
      }
      m[g.index(i, k)] = in ? 1 : 0;
    }
  return m;
}

void apply_mask(const Mask& m, ComplexArray& a) {
  for (std::size_t n = 0; n < a.size(); ++n)
    if (!m[n]) a[n] = 0.0;
}

double half_vmod(double a) { return 0.5 * v_mod(a); }

double penalty(const Field& u, const Field& w, double h) {
  const Grid& g = u.grid;
  const Quadrature q = quadrature(g);
  double sum = 0.0;
  for (int i = 0; i < g.n1; ++i)
    for (int k = 0; k < g.n2; ++k) {
      const std::size_t n = g.index(i, k);
      sum += q.weight(i, k) * theta(std::norm(u.values[n] - w.values[n]));
    }
  return sum / (h * h);
}

// Full A_h gradient (twice the Euler-Lagrange operator).
ComplexArray a_h_gradient(const Field& u, const Field& w, double h) {
  ComplexArray g = grad_E_mod(u);
  const Grid& gr = u.grid;
  const double c = 2.0 / (h * h);
  for (int i = 1; i + 1 < gr.n1; ++i)
    for (int k = 0; k + 1 < gr.n2; ++k) {
      const std::size_t n = gr.index(i, k);
      const cplx d = u.values[n] - w.values[n];
      g[n] += c * theta_prime(std::norm(d)) * d;
    }
  return g;
}

void check_box(const Grid& g, const Box& b) {
  if (b.empty()) return;
  if (b.i0 < 0 || b.k0 < 0 || b.i1 >= g.n1 || b.k1 >= g.n2)
    throw ParameterError("regularize: box outside the grid");
}

}  // namespace

nlohmann::json to_json(const RegularizeReport& r) {
  return nlohmann::json{{"h", r.h},
                        {"e_mod_w", r.e_mod_w},
                        {"e_mod_u", r.e_mod_u},
                        {"l2_dist", r.l2_dist},
                        {"vmod_gap", r.vmod_gap},
                        {"p_gap", r.p_gap},
                        {"el_residual", r.el_residual},
                        {"grad_norm", r.grad_norm},
                        {"modulus_sup", r.modulus_sup},
                        {"a_h", r.a_h},
                        {"iterations", r.iterations},
                        {"converged", r.converged}};
}

double a_h_value(const Field& u, const Field& w, double h) {
  return kinetic_x1(u) + kinetic_transverse(u) + potential_mod(u) + penalty(u, w, h);
}

ComplexArray el_residual_field(const Field& u, const Field& w, double h) {
  ComplexArray g = a_h_gradient(u, w, h);
  for (auto& z : g) z *= 0.5;
  return g;
}

std::pair<Field, RegularizeReport> regularize(const Field& w, double h,
                                              RegularizeOptions opts) {
  if (!(h > 0.0) || !std::isfinite(h)) throw ParameterError("regularize: h must be > 0");
  const Grid& g = w.grid;
  check_box(g, opts.box);
  if (w.values.size() != g.size()) throw InputError("regularize: field size mismatch");
  const Mask mask = free_mask(g, opts.box);
  const Quadrature q = quadrature(g);
  const Preconditioner pc(g);
  const double shift = 1.0 / (h * h) + 1.0;

  Field u = w;
  RegularizeReport rep;
  rep.h = h;
  double a_cur = a_h_value(u, w, h);
  double alpha = opts.step;
  int it = 0;
  for (;; ++it) {
    ComplexArray grad = a_h_gradient(u, w, h);
    apply_mask(mask, grad);
    rep.el_residual = 0.5 * std::sqrt(inner(q, g, grad, grad));
    rep.grad_norm = std::sqrt(kinetic_x1(u) + kinetic_transverse(u));
    if (rep.el_residual <= opts.tol * rep.grad_norm || rep.el_residual == 0.0) {
      rep.converged = true;
      break;
    }
    if (it >= opts.max_iters) break;
    ComplexArray d = pc.apply(g, grad, 1.0, 1.0, shift);
    apply_mask(mask, d);
    const double slope = inner(q, g, grad, d);
    if (!(slope > 0.0)) break;
    bool accepted = false;
    Field trial = u;
    double a_trial = 0.0;
    const double alpha0 = alpha;
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t n = 0; n < d.size(); ++n) trial.values[n] = u.values[n] - alpha * d[n];
      a_trial = a_h_value(trial, w, h);
      if (a_trial < a_cur && a_trial <= a_cur - kArmijo * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      // A_h differences are at rounding level: accept a step that keeps A_h
      // within kSlack and lowers the Euler-Lagrange residual by kStall instead.
      // Otherwise we are at the rounding floor and stop.
      alpha = alpha0;
      for (int bt = 0; bt < 20 && !accepted; ++bt, alpha *= 0.5) {
        for (std::size_t n = 0; n < d.size(); ++n) trial.values[n] = u.values[n] - alpha * d[n];
        a_trial = a_h_value(trial, w, h);
        if (a_trial > a_cur + kSlack) continue;
        ComplexArray gt = a_h_gradient(trial, w, h);
        apply_mask(mask, gt);
        accepted = 0.5 * std::sqrt(inner(q, g, gt, gt)) < kStall * rep.el_residual;
      }
      if (!accepted) break;
    }
    u = std::move(trial);
    a_cur = a_trial;
    alpha = std::min(alpha * 2.0, 1e4 * opts.step);
  }
  rep.iterations = it;
  rep.a_h = a_cur;

  const Box box = opts.box.empty() ? Box::whole(g) : opts.box;
  rep.e_mod_w = e_mod_local(w, box);
  rep.e_mod_u = e_mod_local(u, box);
  double l2 = 0.0, vgap = 0.0;
  for (int i = 0; i < g.n1; ++i)
    for (int k = 0; k < g.n2; ++k) {
      const std::size_t n = g.index(i, k);
      l2 += q.weight(i, k) * std::norm(u.values[n] - w.values[n]);
      vgap += q.weight(i, k) *
              std::abs(half_vmod(std::abs(u.values[n])) - half_vmod(std::abs(w.values[n])));
      if (mask[n])
        rep.modulus_sup = std::max(rep.modulus_sup, std::abs(std::abs(u.values[n]) - 1.0));
    }
  rep.l2_dist = std::sqrt(l2);
  rep.vmod_gap = vgap;
  rep.p_gap = std::abs(momentum(u) - momentum(w));
  return {std::move(u), rep};
}

nlohmann::json to_json(const ModulusControlReport& r) {
  return nlohmann::json{{"threshold", r.threshold}, {"e_mod", r.e_mod},
                        {"applicable", r.applicable}, {"sup", r.sup},
                        {"eps", r.eps}, {"pass", r.pass},
                        {"inner_box", {r.inner.i0, r.inner.i1, r.inner.k0, r.inner.k1}},
                        {"note", r.note}};
}

double modulus_threshold(int dim, double h, double eps) {
  return eps * eps * std::pow(h, dim - 2);
}

ModulusControlReport modulus_control(const Field& w, double h, double eps, double r0) {
  if (!(eps > 0.0) || !(r0 > 0.0)) throw ParameterError("modulus_control: eps, r0 must be > 0");
  const Grid& g = w.grid;
  ModulusControlReport rep;
  rep.eps = eps;
  rep.threshold = modulus_threshold(g.dim, h, eps);
  rep.e_mod = kinetic_x1(w) + kinetic_transverse(w) + potential_mod(w);

  const double margin = 4.0 * r0;
  Box inner;
  inner.i0 = static_cast<int>(std::ceil(margin / g.h1() + 1e-12));
  inner.i1 = g.n1 - 1 - inner.i0;
  inner.k0 = 0;
  inner.k1 = static_cast<int>(std::floor((g.L2 - margin) / g.h2() - 1e-12));
  if (inner.k1 > g.n2 - 2) inner.k1 = g.n2 - 2;
  rep.inner = inner;
  if (inner.empty()) {
    rep.note = "no nodes at distance 4 r0 from the boundary";
    return rep;
  }
  if (rep.e_mod >= rep.threshold) {
    std::ostringstream os;
    os << "E_Mod " << rep.e_mod << " exceeds threshold " << rep.threshold;
    rep.note = os.str();
    return rep;
  }
  rep.applicable = true;
  const auto [u, reg] = regularize(w, h);
  for (int i = inner.i0; i <= inner.i1; ++i)
    for (int k = inner.k0; k <= inner.k1; ++k)
      rep.sup = std::max(rep.sup, std::abs(std::abs(u.at(i, k)) - 1.0));
  rep.pass = rep.sup < eps;
  rep.note = reg.converged ? "regularized" : "regularization did not reach tolerance";
  return rep;
}

}  // namespace nls
