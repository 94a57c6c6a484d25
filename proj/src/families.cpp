#include "nls/families.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include <boost/math/tools/toms748_solve.hpp>

#include "nls/ansatz.hpp"
#include "nls/errors.hpp"
#include "nls/io.hpp"

namespace nls {

PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw ParameterError("fit_power_law: need at least two (x, y) pairs");
  const std::size_t n = x.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw ParameterError("fit_power_law: data must be positive");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (!(den > 0.0)) throw ParameterError("fit_power_law: x values must not all coincide");
  PowerFit f;
  f.exponent = (n * sxy - sx * sy) / den;
  f.coeff = std::exp((sy - f.exponent * sx) / n);
  f.points = static_cast<int>(n);
  return f;
}

double c0_constant(int dim) {
  if (dim < 4) throw DomainError("C0 is defined for N >= 4");
  const double n = dim;
  return std::pow(0.5, 2.0 / (n - 1)) * (n - 1) / std::pow(n - 3, (n - 3) / (n - 1));
}

FamilyPoint summarize(double axis, const SolitonRecord& r) {
  FamilyPoint p;
  p.axis = axis;
  p.converged = r.converged;
  p.status = r.status;
  p.objective = r.objective;
  p.lambda0 = r.lambda0;
  p.multiplier = r.multiplier;
  p.nu = r.nu;
  p.e = r.report.e;
  p.p = r.report.p;
  p.t = r.report.t;
  p.j = r.report.j;
  p.s = r.report.s;
  p.poh = r.report.poh;
  p.residual_pde = r.residual_pde;
  return p;
}

namespace {

nlohmann::json point_json(const FamilyPoint& p) {
  return {{"axis", p.axis}, {"converged", p.converged}, {"status", p.status},
          {"objective", p.objective}, {"lambda0", p.lambda0},
          {"multiplier", p.multiplier}, {"nu", p.nu}, {"e", p.e}, {"p", p.p},
          {"t", p.t}, {"j", p.j}, {"s", p.s}, {"poh", p.poh},
          {"residual_pde", p.residual_pde}};
}

}  // namespace

nlohmann::json to_json(const SweepResult& s) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : s.points) pts.push_back(point_json(p));
  return {{"mode", s.mode == Mode::kA ? "A" : "B"},
          {"dim_N", s.dim},
          {"nu", s.nu},
          {"axis", s.axis},
          {"points", pts},
          {"t_min_fit",
           {{"coeff", s.t_min_fit.coeff},
            {"exponent", s.t_min_fit.exponent},
            {"points", s.t_min_fit.points}}},
          {"s0_estimate", s.s0_estimate},
          {"j_star", s.j_star},
          {"s0_pohozaev", s.s0_pohozaev},
          {"flags", s.flags}};
}

int worker_count(int requested) {
  if (const char* env = std::getenv("NLS_SOLITON_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::pair<double, double> s0_from_fit(const PowerFit& fit) {
  if (!(fit.exponent > 0.0 && fit.exponent < 1.0) || !(fit.coeff > 0.0))
    throw DomainError("s0_from_fit: need A > 0 and 0 < p < 1");
  const auto f = [&](double lj) {
    const double j = std::exp(lj);
    return fit.coeff * std::pow(j, fit.exponent) - j;
  };
  // The maximizer of A j^p - j is O(A^{1/(1-p)}); scan a wide log window
  // around it, then polish on the stationarity condition A p j^p = j, whose
  // root is sharp where the maximum itself is flat.
  const double centre = std::log(fit.coeff) / (1.0 - fit.exponent);
  double best = centre, best_v = f(centre);
  for (int n = -400; n <= 400; ++n) {
    const double lj = centre + 0.05 * n;
    const double v = f(lj);
    if (v > best_v) {
      best_v = v;
      best = lj;
    }
  }
  const auto df = [&](double lj) {
    const double j = std::exp(lj);
    return fit.coeff * fit.exponent * std::pow(j, fit.exponent) - j;
  };
  std::uintmax_t iters = 100;
  const auto [lo, hi] = boost::math::tools::toms748_solve(
      df, best - 0.05, best + 0.05, boost::math::tools::eps_tolerance<double>(52), iters);
  const double lj = 0.5 * (lo + hi);
  return {f(lj), std::exp(lj)};
}

namespace {

nlohmann::json settings_key(Mode mode, double nu, const Nonlinearity& nl,
                            const SweepOptions& o) {
  return {{"mode", mode == Mode::kA ? "A" : "B"},
          {"nu", nu},
          {"grid", grid_to_json(o.grid)},
          {"nonlinearity", nl.name()},
          {"coeffs", nl.coeffs()},
          {"max_iters", o.base.max_iters},
          {"step", o.base.step},
          {"tol_grad", o.base.tol_grad},
          {"tol_constraint", o.base.tol_constraint},
          {"restore_every", o.base.restore_every},
          {"check_every", o.base.check_every}};
}

std::string point_stem(Mode mode, double axis) {
  std::ostringstream os;
  os.precision(17);
  os << (mode == Mode::kA ? "A_j" : "B_q") << axis;
  return os.str();
}

// Appends records to <dir>/records.jsonl and remembers earlier converged
// records with the same settings key.
class RecordStore {
 public:
  RecordStore(std::filesystem::path dir, nlohmann::json key, bool resume)
      : dir_(std::move(dir)), key_(std::move(key)) {
    if (dir_.empty()) return;
    std::filesystem::create_directories(dir_);
    const auto path = dir_ / "records.jsonl";
    if (resume && std::filesystem::exists(path)) {
      std::ifstream in(path);
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception&) {
          continue;  // truncated last line of an interrupted run
        }
        if (j.value("key", nlohmann::json()) != key_) continue;
        if (!j.at("record").value("converged", false)) continue;  // retried
        done_[j.at("axis").get<double>()] = j;
      }
    }
    out_.open(path, std::ios::app);
    if (!out_) throw InputError("cannot open " + path.string());
  }

  bool enabled() const { return !dir_.empty(); }

  // Previously stored record at `axis`, with its field.
  bool lookup(double axis, SolitonRecord& rec) const {
    const auto it = done_.find(axis);
    if (it == done_.end()) return false;
    const auto file = it->second.at("field_file").get<std::string>();
    const auto field_path = dir_ / file;
    if (file.empty() || !std::filesystem::exists(field_path)) return false;
    rec = record_from_json(it->second.at("record"));
    rec.field = load_field(field_path);
    return true;
  }

  void append(Mode mode, double axis, const SolitonRecord& rec) {
    if (!enabled()) return;
    std::lock_guard lock(mu_);
    std::string file;
    if (rec.field.values.size() == rec.field.grid.size()) {
      file = point_stem(mode, axis) + ".bin";
      save_field(dir_ / file, rec.field);
    }
    nlohmann::json line{{"key", key_}, {"axis", axis}, {"field_file", file},
                        {"record", record_to_json(rec)}};
    out_ << line.dump() << '\n';
    out_.flush();
  }

 private:
  std::filesystem::path dir_;
  nlohmann::json key_;
  std::map<double, nlohmann::json> done_;
  std::ofstream out_;
  std::mutex mu_;
};

template <class Solve>
std::vector<SolitonRecord> run_pool(const std::vector<double>& axis, int threads,
                                    Mode mode, RecordStore& store, Solve solve) {
  std::vector<SolitonRecord> out(axis.size());
  std::vector<char> todo(axis.size(), 1);
  for (std::size_t n = 0; n < axis.size(); ++n)
    if (store.lookup(axis[n], out[n])) todo[n] = 0;

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t n; (n = next++) < axis.size();) {
      if (!todo[n]) continue;
      SolitonRecord rec;
      try {
        rec = solve(axis[n]);
      } catch (const std::exception& e) {
        rec = SolitonRecord{};
        rec.constraint_value = axis[n];
        rec.status = e.what();
      }
      store.append(mode, axis[n], rec);
      out[n] = std::move(rec);
    }
  };
  const int nthreads = std::min<int>(threads, static_cast<int>(axis.size()));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return out;
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

void fill_points(SweepResult& s) {
  s.points.clear();
  for (std::size_t n = 0; n < s.axis.size(); ++n) {
    s.points.push_back(summarize(s.axis[n], s.records[n]));
    if (!s.records[n].converged) {
      std::ostringstream os;
      os << "axis " << s.axis[n] << ": " << s.records[n].status;
      s.flags.push_back(os.str());
    }
  }
}

}  // namespace

SweepResult sweep_Tmin(const std::vector<double>& j_values, double nu,
                       const Nonlinearity& nl, const SweepOptions& opts) {
  const int dim = opts.grid.dim;
  if (dim < 4) throw DomainError("mode A requires N ≥ 4");
  check_speed(nu);
  if (j_values.empty()) throw ParameterError("sweep: no j values");
  for (double j : j_values)
    if (!(j > 0.0) || !std::isfinite(j)) throw ParameterError("sweep: j values must be > 0");

  MinimizeConfig cfg = opts.base;
  cfg.mode = Mode::kA;
  cfg.nu = nu;
  cfg.constraint_value = 1.0;
  validate(cfg, dim);

  SweepResult s;
  s.mode = Mode::kA;
  s.dim = dim;
  s.nu = nu;
  s.axis = sorted_unique(j_values);
  RecordStore store(opts.dir, settings_key(Mode::kA, nu, nl, opts), opts.resume);
  s.records = run_pool(s.axis, worker_count(opts.threads), Mode::kA, store,
                       [&](double j) {
                         MinimizeConfig c = cfg;
                         c.constraint_value = j;
                         const PreparedSeed seed = prepare_initial(opts.grid, j, nl, nu);
                         return minimize_T_fixed_J(seed.field, c, nl);
                       });
  fill_points(s);

  std::vector<double> xs, ys, s_poh;
  for (const auto& p : s.points) {
    if (!p.converged) continue;
    xs.push_back(p.axis);
    ys.push_back(p.objective);
    s_poh.push_back(2.0 * p.t / (dim - 1));
  }
  if (xs.size() < 4) {
    s.flags.push_back("fewer than 4 converged points: no power-law fit");
    return s;
  }
  s.t_min_fit = fit_power_law(xs, ys);
  s.s0_pohozaev = std::accumulate(s_poh.begin(), s_poh.end(), 0.0) / s_poh.size();
  try {
    std::tie(s.s0_estimate, s.j_star) = s0_from_fit(s.t_min_fit);
  } catch (const DomainError& e) {
    s.flags.push_back(std::string("no S0 estimate: ") + e.what());
  }
  return s;
}

SweepResult ep_curve(const std::vector<double>& q_values, const Nonlinearity& nl,
                     const SweepOptions& opts) {
  const int dim = opts.grid.dim;
  if (q_values.empty()) throw ParameterError("ep-curve: no q values");
  for (double q : q_values)
    if (!(q < 0.0) || !std::isfinite(q)) throw ParameterError("ep-curve: q values must be < 0");
  MinimizeConfig cfg = opts.base;
  cfg.mode = Mode::kB;
  cfg.constraint_value = -1.0;
  validate(cfg, dim);

  SweepResult s;
  s.mode = Mode::kB;
  s.dim = dim;
  s.axis = sorted_unique(q_values);
  RecordStore store(opts.dir, settings_key(Mode::kB, 0.0, nl, opts), opts.resume);
  s.records = run_pool(s.axis, worker_count(opts.threads), Mode::kB, store,
                       [&](double q) {
                         MinimizeConfig c = cfg;
                         c.constraint_value = q;
                         return minimize_E_fixed_P(prepare_initial_momentum(opts.grid, q), c,
                                                   nl);
                       });
  fill_points(s);
  return s;
}

namespace {

CertifyCheck rel_check(std::string name, double lhs, double rhs, double tol,
                       std::string what) {
  CertifyCheck c;
  c.name = std::move(name);
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  c.residual = scale > 0.0 ? std::abs(lhs - rhs) / scale : 0.0;
  c.tolerance = tol;
  c.pass = std::isfinite(c.residual) && c.residual <= tol;
  std::ostringstream os;
  os << what << ": " << lhs << " vs " << rhs;
  c.detail = os.str();
  return c;
}

CertifyCheck not_applicable(std::string name, std::string why) {
  CertifyCheck c;
  c.name = std::move(name);
  c.applicable = false;
  c.detail = std::move(why);
  return c;
}

}  // namespace

CertifyReport verify_family_identities(const SweepResult& sweep, double tol) {
  if (sweep.mode != Mode::kA) throw ParameterError("verify: needs a mode A sweep");
  const int n = sweep.dim;
  const double p_exact = static_cast<double>(n - 3) / (n - 1);
  CertifyReport out;

  std::vector<const FamilyPoint*> ok;
  for (const auto& p : sweep.points)
    if (p.converged) ok.push_back(&p);
  {
    CertifyCheck c;
  c.name = "converged";
    c.pass = ok.size() == sweep.points.size();
    c.residual = static_cast<double>(sweep.points.size() - ok.size());
    std::ostringstream os;
    os << ok.size() << " of " << sweep.points.size() << " points converged";
    c.detail = os.str();
    out.checks.push_back(c);
  }
  if (sweep.t_min_fit.points < 4 || !(sweep.s0_estimate > 0.0)) {
    for (const char* name : {"power_law", "subadditivity", "j_star", "s0_sup", "c0",
                             "lambda0", "action", "s0_pohozaev", "sobolev"}) {
      CertifyCheck c;
  c.name = name;
      c.detail = "no fit / S0 estimate";
      out.checks.push_back(c);
    }
    return out;
  }

  const double s0 = sweep.s0_estimate;
  const double js = sweep.j_star;
  // T_min at x, scaled exactly from the record closest in log j.
  const auto t_min_at = [&](double x) {
    const FamilyPoint* best = ok.front();
    for (const auto* p : ok)
      if (std::abs(std::log(p->axis / x)) < std::abs(std::log(best->axis / x))) best = p;
    return best->objective * std::pow(x / best->axis, p_exact);
  };

  out.checks.push_back(
      rel_check("power_law", sweep.t_min_fit.exponent, p_exact, tol, "fitted exponent"));

  {
    CertifyCheck c;
  c.name = "subadditivity";
    int triples = 0;
    bool all = true;
    std::ostringstream os;
    for (const auto* a : ok)
      for (const auto* b : ok) {
        if (b->axis < a->axis) continue;
        for (const auto* ab : ok) {
          if (std::abs(ab->axis - (a->axis + b->axis)) > 1e-12 * ab->axis) continue;
          ++triples;
          const double gap = a->objective + b->objective - ab->objective;
          all = all && gap > 0.0;
          c.residual = triples == 1 ? gap : std::min(c.residual, gap);
          os << "T(" << ab->axis << ")=" << ab->objective << " < " << a->objective << "+"
             << b->objective << "; ";
        }
      }
    if (triples == 0) {
      c = not_applicable("subadditivity", "no j values with j_a + j_b on the axis");
    } else {
      c.pass = all;
      c.detail = os.str();
    }
    out.checks.push_back(c);
  }

  out.checks.push_back(rel_check("j_star", js, (n - 3) * s0 / 2.0, tol, "j* vs (N-3) S0/2"));
  out.checks.push_back(rel_check("s0_sup", t_min_at(js) - js, s0, tol, "T_min(j*) - j* vs S0"));
  out.checks.push_back(rel_check("c0", t_min_at(1.0),
                                 c0_constant(n) * std::pow(s0, 2.0 / (n - 1)), tol,
                                 "T_min(1) vs C0 S0^{2/(N-1)}"));
  {
    // lambda0(j) = lambda0(j*) (j*/j)^{1/(N-1)}.
    double worst = 0.0, worst_val = 1.0;
    for (const auto* p : ok) {
      const double l = p->lambda0 * std::pow(p->axis / js, 1.0 / (n - 1));
      if (std::abs(l - 1.0) >= worst) {
        worst = std::abs(l - 1.0);
        worst_val = l;
      }
    }
    out.checks.push_back(rel_check("lambda0", worst_val, 1.0, tol, "worst lambda0(j*)"));
  }
  {
    double worst = -1.0, worst_s = 0.0;
    for (const auto* p : ok) {
      const double r = std::abs(p->s - s0);
      if (r > worst) {
        worst = r;
        worst_s = p->s;
      }
    }
    out.checks.push_back(rel_check("action", worst_s, s0, tol, "worst S of rescaled record vs S0"));
  }
  out.checks.push_back(
      rel_check("s0_pohozaev", sweep.s0_pohozaev, s0, tol, "2T/(N-1) of minimizers vs S0"));
  {
    CertifyCheck c;
  c.name = "sobolev";
    const double k = c0_constant(n) * std::pow(s0, 2.0 / (n - 1));
    c.pass = true;
    c.residual = 0.0;
    std::ostringstream os;
    for (const auto* p : ok) {
      // The constrained problem holds J = j exactly before rescaling.
      const double bound = k * std::pow(p->axis, p_exact);
      const double ratio = p->objective / bound;
      c.pass = c.pass && ratio >= 1.0 - tol;
      c.residual = std::max(c.residual, 1.0 - ratio);
      os << "j=" << p->axis << " T/bound=" << ratio << "; ";
    }
    c.tolerance = tol;
    c.detail = os.str();
    out.checks.push_back(c);
  }
  return out;
}

CertifyReport verify_energy_momentum(const SweepResult& sweep) {
  if (sweep.mode != Mode::kB) throw ParameterError("verify: needs a mode B sweep");
  CertifyReport out;
  std::vector<const FamilyPoint*> ok;
  for (const auto& p : sweep.points)
    if (p.converged) ok.push_back(&p);

  {
    CertifyCheck c;
  c.name = "converged";
    c.pass = ok.size() == sweep.points.size();
    c.residual = static_cast<double>(sweep.points.size() - ok.size());
    std::ostringstream os;
    for (const auto& p : sweep.points)
      os << "q=" << p.axis << ": " << p.status << " (nu=" << p.nu << "); ";
    c.detail = os.str();
    out.checks.push_back(c);
  }
  {
    CertifyCheck c;
  c.name = "speeds";
    c.pass = !sweep.points.empty();
    std::ostringstream os;
    for (const auto& p : sweep.points) {
      const bool in = p.nu > 0.0 && p.nu < std::sqrt(2.0);
      c.pass = c.pass && in;
      os << p.nu << (in ? " " : " (outside) ");
    }
    c.detail = os.str();
    out.checks.push_back(c);
  }
  if (ok.empty()) {
    for (const char* name : {"inf_energy", "inf_momentum", "action", "monotone"}) {
      CertifyCheck c;
  c.name = name;
      c.detail = "no converged points";
      out.checks.push_back(c);
    }
    return out;
  }
  {
    CertifyCheck c;
  c.name = "inf_energy";
    c.residual = ok.front()->e;
    for (const auto* p : ok) c.residual = std::min(c.residual, p->e);
    c.pass = c.residual > 0.0;
    c.detail = "min E over converged points";
    out.checks.push_back(c);
  }
  {
    CertifyCheck c;
  c.name = "inf_momentum";
    c.residual = std::abs(ok.front()->p);
    for (const auto* p : ok) c.residual = std::min(c.residual, std::abs(p->p));
    c.pass = c.residual > 0.0;
    c.detail = "min |P| over converged points";
    out.checks.push_back(c);
  }
  {
    CertifyCheck c;
  c.name = "action";
    c.pass = true;
    c.tolerance = 0.01;
    std::ostringstream os;
    for (const auto* p : ok) {
      const double rel = p->s / p->e;
      c.pass = c.pass && rel >= -0.01;
      c.residual = std::min(c.residual, rel);
      os << "S/E=" << rel << " ";
    }
    c.detail = os.str();
    out.checks.push_back(c);
  }
  {
    CertifyCheck c;
  c.name = "monotone";
    auto sorted = ok;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto* a, const auto* b) { return std::abs(a->p) < std::abs(b->p); });
    c.pass = true;
    for (std::size_t i = 1; i < sorted.size(); ++i)
      c.pass = c.pass && sorted[i]->e > sorted[i - 1]->e;
    c.detail = "E increasing in |P|";
    out.checks.push_back(c);
  }
  return out;
}

void write_curve_csv(const std::filesystem::path& path, const SweepResult& s) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out.precision(17);
  out << "axis,E,P,T,J,S,Poh,nu,lambda0,residual_pde,residual_poh,converged\n";
  for (const auto& p : s.points)
    out << p.axis << ',' << p.e << ',' << p.p << ',' << p.t << ',' << p.j << ',' << p.s << ','
        << p.poh << ',' << p.nu << ',' << p.lambda0 << ',' << p.residual_pde << ','
        << std::abs(p.poh) << ',' << (p.converged ? 1 : 0) << '\n';
}

}  // namespace nls
