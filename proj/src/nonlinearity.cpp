#include "nls/nonlinearity.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>

#include "nls/errors.hpp"

namespace nls {

Nonlinearity::Nonlinearity(std::string name, std::vector<double> coeffs,
                           std::vector<double> params, AssumptionMeta meta)
    : name_(std::move(name)),
      coeffs_(std::move(coeffs)),
      params_(std::move(params)),
      meta_(meta) {
  if (coeffs_.empty()) throw ParameterError("nonlinearity: empty polynomial");
}

double Nonlinearity::g(double s) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * s + *it;
  return acc;
}

double Nonlinearity::g_prime(double s) const {
  double acc = 0.0;
  for (std::size_t k = coeffs_.size() - 1; k >= 1; --k) acc = acc * s + k * coeffs_[k];
  return acc;
}

double Nonlinearity::v(double s) const {
  // V(s) = sum a_k (1 - s^{k+1})/(k+1); V(1) = 0 exactly.
  double acc = 0.0;
  double pw = s;
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    acc += coeffs_[k] * (1.0 - pw) / static_cast<double>(k + 1);
    pw *= s;
  }
  return acc;
}

Nonlinearity make_gp() {
  AssumptionMeta meta;
  meta.p0 = 1.0;
  meta.claims_ass3 = true;
  meta.ass3_c = 0.5;
  meta.ass3_p1 = 1.0;
  meta.ass3_r0 = 2.0;
  return Nonlinearity("gp", {1.0, -1.0}, {}, meta);
}

Nonlinearity make_cubic_quintic(double c1) {
  if (!(c1 > 0.0) || !std::isfinite(c1))
    throw ParameterError("cubic-quintic: c1 must be positive");
  const double c3 = 2.0 * c1 + 1.0;
  const double c5 = c1 + 1.0;
  AssumptionMeta meta;
  meta.p0 = 2.0;
  meta.claims_ass3 = true;
  meta.ass3_c = 0.5 * c5;
  meta.ass3_p1 = 2.0;
  // (c5/2) x^2 - c3 x + c1 >= 0 beyond the larger root.
  meta.ass3_r0 = std::max(2.0, (c3 + std::sqrt(c3 * c3 - 2.0 * c5 * c1)) / c5);
  return Nonlinearity("cubic-quintic", {-c1, c3, -c5}, {c1, c3, c5}, meta);
}

Nonlinearity make_polynomial(std::string name, std::vector<double> coeffs,
                             AssumptionMeta meta) {
  meta.p0 = std::max(meta.p0, static_cast<double>(coeffs.size() - 1));
  return Nonlinearity(std::move(name), std::move(coeffs), {}, meta);
}

double smooth_step(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / u);
  const double b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

double smooth_step_prime(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / u);
  const double b = std::exp(-1.0 / (1.0 - u));
  const double da = a / (u * u);
  const double db = -b / ((1.0 - u) * (1.0 - u));
  return (da * b - a * db) / ((a + b) * (a + b));
}

namespace {

// int_0^u S(t) dt on [0, 1]: adaptive quadrature at table nodes, cubic
// Hermite interpolation (slopes S) in between.
class StepIntegral {
 public:
  StepIntegral() : values_(kNodes + 1) {
    using boost::math::quadrature::gauss_kronrod;
    double acc = 0.0;
    values_[0] = 0.0;
    for (int n = 0; n < kNodes; ++n) {
      acc += gauss_kronrod<double, 31>::integrate(smooth_step, node(n), node(n + 1), 10,
                                                  1e-15);
      values_[n + 1] = acc;
    }
  }

  double operator()(double u) const {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return values_[kNodes] + (u - 1.0);
    const double pos = u * kNodes;
    const int n = std::min(static_cast<int>(pos), kNodes - 1);
    const double t = pos - n;
    const double h = 1.0 / kNodes;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * values_[n] + (t3 - 2 * t2 + t) * h * smooth_step(node(n)) +
           (-2 * t3 + 3 * t2) * values_[n + 1] + (t3 - t2) * h * smooth_step(node(n + 1));
  }

 private:
  static constexpr int kNodes = 8192;
  static double node(int n) { return static_cast<double>(n) / kNodes; }
  std::vector<double> values_;
};

double step_integral(double u) {
  static const StepIntegral table;
  return table(u);
}

}  // namespace

double theta(double x) {
  if (x < 0.0) return -theta(-x);
  if (x <= 2.0) return x;
  if (x >= 4.0) return 3.0;
  // S(1 - t) = 1 - S(t): integrate from the nearer end so Theta stays
  // monotone to the last bit near x = 4.
  const double u = 0.5 * (x - 2.0);
  if (u <= 0.5) return x - 2.0 * step_integral(u);
  return 3.0 - 2.0 * step_integral(1.0 - u);
}

double theta_prime(double x) {
  x = std::abs(x);
  if (x <= 2.0) return 1.0;
  if (x >= 4.0) return 0.0;
  return 1.0 - smooth_step(0.5 * (x - 2.0));
}

double v_mod(double w_abs) {
  const double t = theta(w_abs);
  const double d = t * t - 1.0;
  return d * d;
}

bool AssumptionReport::ass1() const { return find("Ass1").pass; }
bool AssumptionReport::ass2() const { return find("Ass2").pass; }
bool AssumptionReport::ass3() const { return find("Ass3").pass; }

const AssumptionCheck& AssumptionReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw InputError("assumption report: no entry " + name);
}

AssumptionReport check_assumptions(const Nonlinearity& nl, int dim) {
  if (dim < 3) throw ParameterError("check_assumptions: N must be >= 3");
  AssumptionReport rep;

  {
    AssumptionCheck c;
  c.name = "Ass1";
    const double g1 = nl.g(1.0);
    const double h = 1e-5;
    const double dg = (nl.g(1.0 + h) - nl.g(1.0 - h)) / (2.0 * h);
    c.pass = std::abs(g1) <= 1e-12 && std::abs(dg + 1.0) <= 1e-6;
    std::ostringstream os;
    os << "G(1)=" << g1 << ", G'(1)~" << dg;
    c.detail = os.str();
    rep.checks.push_back(c);
  }

  {
    AssumptionCheck c;
  c.name = "Ass2";
    const double p0 = nl.meta().p0;
    const double limit = 2.0 / (dim - 2);
    // Bound constant estimated on [0, 10]; must not grow on a log sample.
    double c_near = 0.0;
    for (int n = 0; n <= 1000; ++n) {
      const double x = 0.01 * n;
      c_near = std::max(c_near, std::abs(nl.g(x)) / (1.0 + std::pow(x, p0)));
    }
    double c_far = 0.0;
    for (int n = 0; n <= 600; ++n) {
      const double x = std::pow(10.0, 1.0 + 5.0 * n / 600.0);
      c_far = std::max(c_far, std::abs(nl.g(x)) / (1.0 + std::pow(x, p0)));
    }
    const bool bounded = c_far <= 10.0 * std::max(c_near, 1.0);
    c.pass = p0 < limit && bounded;
    std::ostringstream os;
    os << "p0=" << p0 << " (need < " << limit << "), c~" << std::max(c_near, c_far)
       << (bounded ? "" : " (growth exceeds x^p0)");
    c.detail = os.str();
    rep.checks.push_back(c);
  }

  {
    AssumptionCheck c;
  c.name = "Ass3";
    const auto& m = nl.meta();
    if (!m.claims_ass3) {
      c.checked = false;
      c.pass = false;
      c.detail = "not claimed";
    } else {
      bool ok = m.ass3_r0 > 1.0 && m.ass3_c > 0.0 && m.ass3_p1 > 0.0;
      for (int n = 0; n <= 2000 && ok; ++n) {
        const double x = m.ass3_r0 * std::pow(10.0, 4.0 * n / 2000.0);
        ok = nl.g(x) <= -m.ass3_c * std::pow(x, m.ass3_p1);
      }
      c.pass = ok;
      std::ostringstream os;
      os << "G(x) <= -" << m.ass3_c << " x^" << m.ass3_p1 << " for x >= " << m.ass3_r0;
      c.detail = os.str();
    }
    rep.checks.push_back(c);
  }
  return rep;
}

}  // namespace nls
