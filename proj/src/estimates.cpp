#include "maghelm/estimates.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "maghelm/angular.hpp"
#include "maghelm/linalg.hpp"
#include "maghelm/norms.hpp"
#include "maghelm/parallel.hpp"

namespace maghelm::estimates {

namespace {

const char* kNames[] = {"thm1_alpha0", "thm1_large_eps", "bp", "src", "morrey", "surface", "weighted_w1", "grad_abs2"};

std::string num(double x) {
  std::ostringstream o;
  o.precision(6);
  o << x;
  return o.str();
}

bool needs_h12(EstimateKind k) {
  return k == EstimateKind::thm1_alpha0 || k == EstimateKind::thm1_large_eps || k == EstimateKind::bp ||
         k == EstimateKind::weighted_w1;
}

bool needs_h3(EstimateKind k) {
  return k == EstimateKind::src || k == EstimateKind::morrey || k == EstimateKind::surface ||
         k == EstimateKind::grad_abs2;
}

void check_hypotheses_for(EstimateKind kind, const PotentialSpec& spec, const RadialMesh& mesh, int cutoff) {
  if (!needs_h12(kind) && !needs_h3(kind)) return;
  auto h = check_hypotheses(spec, mesh, cutoff);
  if (needs_h12(kind)) {
    if (!h.stable) throw Error("(H1)(H2) constants not stable under refinement");
    if (!h.satisfied) throw Error("(H1)(H2) violated: A_V + 2 A_B = " + num(h.A_V + 2.0 * h.A_B));
  }
  if (needs_h3(kind) && !h.h3_ok) throw Error("(H3) violated at r = " + num(h.h3_violation_r));
}

double weighted(const Bundle& g, const std::function<double(double)>& w) {
  double s = 0.0;
  for (const auto& f : g) {
    const auto& m = *f.mesh;
    RadialField p = f.to_plain();
    std::vector<double> e(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
      e[i] = std::norm(p.values[i]) * w(m.nodes[i]) * std::pow(m.nodes[i], f.mode.d - 1);
    s += m.integrate(e);
  }
  return s;
}

// int over r in [lo, hi] (nodes only) of the sphere integral of |grad |u|^2|
double grad_abs2_lhs(const PotentialSpec& spec, const SolutionBundle& u, double lo, double hi) {
  if (u.empty()) return 0.0;
  const auto& m = *u.front().u.mesh;
  const int d = u.front().mode.d;
  struct Dir {
    double theta, phi, w;
  };
  std::vector<Dir> dirs;
  if (d == 2) {
    const int n = 64;
    for (int j = 0; j < n; ++j) dirs.push_back({0.5 * M_PI, 2.0 * M_PI * (j + 0.5) / n, 2.0 * M_PI / n});
  } else {
    auto gl = linalg::gauss_legendre(24, -1.0, 1.0);
    const int n = 48;
    for (std::size_t a = 0; a < gl.x.size(); ++a)
      for (int j = 0; j < n; ++j) dirs.push_back({std::acos(gl.x[a]), 2.0 * M_PI * (j + 0.5) / n, gl.w[a] * 2.0 * M_PI / n});
  }
  const double h = 1e-6;
  // Y, dY/dtheta, dY/dphi per mode per direction
  std::vector<std::vector<std::array<cplx, 3>>> Y(u.size(), std::vector<std::array<cplx, 3>>(dirs.size()));
  for (std::size_t k = 0; k < u.size(); ++k)
    for (std::size_t q = 0; q < dirs.size(); ++q) {
      const auto& D = dirs[q];
      Y[k][q][0] = angular::value(spec, u[k].mode, D.theta, D.phi);
      Y[k][q][1] = d == 2 ? 0.0
                          : (angular::value(spec, u[k].mode, D.theta + h, D.phi) -
                             angular::value(spec, u[k].mode, D.theta - h, D.phi)) / (2.0 * h);
      Y[k][q][2] = (angular::value(spec, u[k].mode, D.theta, D.phi + h) -
                    angular::value(spec, u[k].mode, D.theta, D.phi - h)) / (2.0 * h);
    }
  std::vector<double> e(m.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    double r = m.nodes[i];
    if (r < lo * (1 - 1e-12) || r > hi * (1 + 1e-12)) continue;
    double s = 0.0;
    for (std::size_t q = 0; q < dirs.size(); ++q) {
      cplx U = 0, Ur = 0, Ut = 0, Up = 0;
      for (std::size_t k = 0; k < u.size(); ++k) {
        U += u[k].u.values[i] * Y[k][q][0];
        Ur += u[k].du.values[i] * Y[k][q][0];
        Ut += u[k].u.values[i] * Y[k][q][1];
        Up += u[k].u.values[i] * Y[k][q][2];
      }
      double st = d == 2 ? 1.0 : std::sin(dirs[q].theta);
      double gr = 2.0 * std::real(std::conj(U) * Ur);
      double gt = 2.0 * std::real(std::conj(U) * Ut) / r;
      double gp = 2.0 * std::real(std::conj(U) * Up) / (r * st);
      s += dirs[q].w * std::sqrt(gr * gr + gt * gt + gp * gp);
    }
    e[i] = s * std::pow(r, d - 1);
  }
  // trapezoid restricted to [lo, hi]
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < m.size(); ++i) {
    double a = m.nodes[i], b = m.nodes[i + 1];
    if (a >= lo * (1 - 1e-12) && b <= hi * (1 + 1e-12)) total += 0.5 * m.h(i) * (e[i] + e[i + 1]);
  }
  return total;
}

double support_radius(const Bundle& g) {
  double mx = 0.0, R = 0.0;
  for (const auto& f : g)
    for (const auto& v : f.values) mx = std::max(mx, std::abs(v));
  for (const auto& f : g)
    for (std::size_t i = 0; i < f.size(); ++i)
      if (std::abs(f.values[i]) > 1e-14 * mx) R = std::max(R, f.mesh->nodes[i]);
  return R;
}

}  // namespace

const char* to_string(EstimateKind k) { return kNames[(int)k]; }

EstimateKind kind_from_string(const std::string& s) {
  for (int i = 0; i < 8; ++i)
    if (s == kNames[i]) return (EstimateKind)i;
  throw Error("unknown estimate kind '" + s + "'");
}

EstimateReport evaluate_estimate(EstimateKind kind, const PotentialSpec& spec, const SolutionBundle& u,
                                 const Bundle& g, const ProblemSpec& problem, const Extras& extras) {
  const double lam = problem.lambda, eps = problem.epsilon;
  std::string name = to_string(kind);
  switch (kind) {
    case EstimateKind::thm1_alpha0: {
      double lhs = u.empty() ? 0.0 : norms::phase_shifted_gradient(u, lam, problem.sign);
      return make_report(name, lhs, norms::weighted_l2(g, 2.0), problem, "int |grad_A(e^{-+i sqrt(lambda)|x|} u)|^2 / int |x|^2 |f|^2");
    }
    case EstimateKind::thm1_large_eps: {
      auto s = norms::gradient_split(u, spec);
      return make_report(name, s.radial + s.tangential, norms::weighted_l2(g, 2.0), problem,
                         "int |grad_A u|^2 / int |x|^2 |f|^2");
    }
    case EstimateKind::bp:
      return make_report(name, norms::weighted_l2(u, -2.0), norms::weighted_l2(g, 2.0), problem,
                         "int |u|^2/|x|^2 / int |x|^2 |f|^2");
    case EstimateKind::src: {
      double lhs = 0.0, Rstar = 1.0, plain = 0.0;
      if (!u.empty()) {
        const auto& m = *u.front().u.mesh;
        auto t = norms::gradient_tail(u, lam, true, problem.sign);
        auto t0 = norms::gradient_tail(u, lam, false, problem.sign);
        for (std::size_t i = 0; i < m.size(); ++i) {
          if (m.nodes[i] < 1.0) continue;
          if (m.nodes[i] * t[i] > lhs) { lhs = m.nodes[i] * t[i]; Rstar = m.nodes[i]; }
          plain = std::max(plain, m.nodes[i] * t0[i]);
        }
      }
      double n1 = norms::ah_dual(g, 1.0);
      auto rep = make_report(name, lhs, norms::weighted_l2(g, 3.0) + n1 * n1, problem,
                             "sup_{R>=1} R int_{|x|>=R} |grad_A(e^{-i sqrt(lambda)|x|} u)|^2");
      rep.extras["argmax_R"] = Rstar;
      rep.extras["unshifted_sup"] = plain;
      return rep;
    }
    case EstimateKind::morrey: {
      Bundle fu = norms::fields(u);
      double a = norms::ah_norm(fu, 1.0), b = norms::ah_norm_gradient(u, 1.0), c = norms::tangential_over_r(u);
      double n1 = norms::ah_dual(g, 1.0);
      auto rep = make_report(name, lam * a * a + b * b + c, (1.0 + eps) * n1 * n1, problem,
                             "lambda |||u|||_1^2 + |||grad_A u|||_1^2 + int |grad_perp u|^2/|x|");
      rep.extras["N1"] = n1;
      return rep;
    }
    case EstimateKind::surface: {
      double lhs = 0.0, Rstar = 1.0;
      if (!u.empty()) {
        const auto& m = *u.front().u.mesh;
        int d = u.front().mode.d;
        for (std::size_t i = 0; i < m.size(); ++i) {
          double R = m.nodes[i];
          if (R < 1.0) continue;
          double s = 0.0;
          for (const auto& x : u) s += std::norm(x.u.values[i]);
          double v = std::pow(R, d - 1) * s + eps / std::sqrt(lam) * std::pow(R, d) * s;
          if (v > lhs) { lhs = v; Rstar = R; }
        }
      }
      double n1 = norms::ah_dual(g, 1.0);
      double rhs = weighted(g, [eps](double r) { return (1.0 + eps * r) * r * r * r; }) + (1.0 + eps) * n1 * n1;
      auto rep = make_report(name, lhs, rhs, problem, "sup_{R>=1} surface integrals of |u|^2");
      rep.extras["argmax_R"] = Rstar;
      return rep;
    }
    case EstimateKind::weighted_w1: {
      if (!extras.omega) throw Error("weighted_w1 needs a weight");
      auto w = extras.omega;
      double lhs = 0.0;
      for (const auto& x : u) {
        const auto& m = *x.u.mesh;
        std::vector<double> e(m.size());
        for (std::size_t i = 0; i < m.size(); ++i) {
          double r = m.nodes[i];
          e[i] = std::norm(x.u.values[i]) * std::sqrt(w(r)) / r * std::pow(r, x.mode.d - 1);
        }
        lhs += m.integrate(e);
      }
      double rhs = weighted(g, [&](double r) { return r / std::sqrt(w(r)); });
      return make_report(name, lhs, rhs, problem, "int |u|^2 w^{1/2}/|x| / int |f|^2 |x|/w^{1/2}");
    }
    case EstimateKind::grad_abs2: {
      double R0 = extras.R0;
      if (!(R0 > 0)) throw Error("grad_abs2 needs R0 > 0");
      if (support_radius(g) > R0 * (1 + 1e-9)) throw Error("supp f not inside B(0, R0)");
      double mn = std::min(R0, 1.0), F = norms::weighted_l2(g, 0.0);
      EstimateReport rep;
      if (extras.R >= 1.0) {
        double lhs = grad_abs2_lhs(spec, u, extras.R, 2.0 * extras.R);
        rep = make_report(name, lhs, std::sqrt(R0 * R0 * R0 + mn) * std::sqrt(mn / lam) * F, problem,
                          "int_{R<=|x|<=2R} |grad |u|^2|");
      } else {
        double lhs = grad_abs2_lhs(spec, u, 0.0, 1.0);
        rep = make_report(name, lhs, mn / std::sqrt(lam) * F, problem, "int_{|x|<=1} |grad |u|^2|");
      }
      rep.extras["R"] = extras.R;
      rep.extras["R0"] = R0;
      return rep;
    }
  }
  throw Error("unknown estimate kind");
}

EstimateReport verify_estimate(EstimateKind kind, const PotentialSpec& spec, const Source& f,
                               const ProblemSpec& problem, const Extras& extras) {
  validate_spec(problem);
  const double lam = problem.lambda, eps = problem.epsilon;
  if (kind == EstimateKind::thm1_alpha0 && !(eps < lam)) throw Error("thm1_alpha0 needs eps < lambda");
  if (kind == EstimateKind::thm1_large_eps && !(lam <= eps)) throw Error("thm1_large_eps needs lambda <= eps");
  if ((kind == EstimateKind::src || kind == EstimateKind::morrey || kind == EstimateKind::surface ||
       kind == EstimateKind::grad_abs2) && !(lam > 0))
    throw Error(std::string(to_string(kind)) + " needs lambda > 0");
  MeshPtr mesh = extras.mesh ? extras.mesh : default_mesh(problem);
  check_hypotheses_for(kind, spec, *mesh, problem.mode_cutoff);
  if (kind == EstimateKind::weighted_w1) return verify_w1(spec, extras.omega, f, problem, mesh);
  auto g = decompose_rhs(f, spec, problem, mesh);
  auto u = resolve(spec, g, problem);
  auto rep = evaluate_estimate(kind, spec, u, g, problem, extras);
  rep.extras["nodes"] = (double)mesh->size();
  return rep;
}

HardyResult hardy_report(const PotentialSpec& spec, int d, const RadialMesh& mesh, int mode_cutoff) {
  if (d != 2 && d != 3) throw Error("hardy_constant needs d in {2, 3}");
  auto ms = angular::modes(spec, d, mode_cutoff);
  if (ms.empty()) throw Error("no modes");
  HardyResult res;
  res.nu_min = INFINITY;
  for (const auto& m : ms) res.nu_min = std::min(res.nu_min, m.nu_eff);
  auto weight = [](const RadialMesh& m) {
    std::vector<double> w(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) w[i] = 1.0 / (m.nodes[i] * m.nodes[i]);
    return w;
  };
  // the quotient decreases in nu, so the smallest index is extremal
  auto q = max_rayleigh_quotient(mesh, res.nu_min, weight(mesh));
  double lo = std::min(mesh.r_min(), 1.0 / mesh.r_max()), hi = 1.0 / lo;
  RadialMesh wide = RadialMesh::logarithmic(lo * lo, hi * hi, 2 * (int)mesh.size() - 1);
  auto qw = max_rayleigh_quotient(wide, res.nu_min, weight(wide));
  res.value = q.value;
  res.wide = qw.value;
  res.iterations = q.iterations;
  res.bounded = res.nu_min > 1e-12 && !q.indefinite && !qw.indefinite && q.converged && qw.value <= 1.5 * q.value;
  return res;
}

double hardy_constant(const PotentialSpec& spec, int d, const RadialMesh& mesh, int mode_cutoff) {
  auto r = hardy_report(spec, d, mesh, mode_cutoff);
  if (!r.bounded) throw Error("no Hardy inequality");
  return r.value;
}

double sobolev_constant(const PotentialSpec& spec, int d, const std::function<double(double)>& w, int mode_cutoff,
                        const RadialMesh& mesh) {
  if (!w) throw Error("degenerate weight");
  auto ms = angular::modes(spec, d, mode_cutoff);
  double nu = INFINITY;
  for (const auto& m : ms) nu = std::min(nu, m.nu_eff);
  auto run = [&](const RadialMesh& m) {
    std::vector<double> v(m.size());
    double mx = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      v[i] = w(m.nodes[i]);
      if (!std::isfinite(v[i]) || v[i] < 0) throw Error("weight must be finite and nonnegative");
      mx = std::max(mx, v[i]);
    }
    if (mx == 0.0) throw Error("degenerate weight");
    return max_rayleigh_quotient(m, nu, v);
  };
  auto a = run(mesh);
  auto b = run(mesh.refined());
  if (a.indefinite || b.indefinite || !(b.value <= 1.5 * a.value)) throw Error("not a Sobolev weight on this mesh");
  return b.value;
}

double sobolev_constant(const PotentialSpec& spec, int d, const std::function<double(double)>& w, int mode_cutoff) {
  ProblemSpec p;
  p.d = d;
  return sobolev_constant(spec, d, w, mode_cutoff, *default_mesh(p));
}

EstimateReport verify_w1(const PotentialSpec& spec, const std::function<double(double)>& w, const Source& f,
                         const ProblemSpec& problem, MeshPtr mesh) {
  validate_spec(problem);
  if (!mesh) mesh = default_mesh(problem);
  double c = sobolev_constant(spec, problem.d, w, problem.mode_cutoff, *mesh);
  auto g = decompose_rhs(f, spec, problem, mesh);
  auto u = resolve(spec, g, problem);
  Extras ex;
  ex.omega = w;
  auto rep = evaluate_estimate(EstimateKind::weighted_w1, spec, u, g, problem, ex);
  double l55 = weighted(norms::fields(u), w), r55 = norms::weighted_l2(g, 2.0);
  double ld = norms::weighted_l2(u, -2.0), rd = weighted(g, [&](double r) { return 1.0 / w(r); });
  rep.extras["c_omega"] = c;
  rep.extras["ratio_weighted"] = r55 > 0 ? l55 / r55 : 0.0;
  rep.extras["ratio_dual"] = rd > 0 ? ld / rd : 0.0;
  rep.extras["interpolation_bound"] = std::sqrt(rep.extras["ratio_weighted"] * rep.extras["ratio_dual"]);
  rep.extras["nodes"] = (double)mesh->size();
  return rep;
}

void summarize(SweepResult& s) {
  s.max_ratio = 0.0;
  s.min_ratio = INFINITY;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& p : s.points) {
    double r = p.report.ratio;
    s.max_ratio = std::max(s.max_ratio, r);
    s.min_ratio = std::min(s.min_ratio, r);
    if (r > 0 && p.lambda > 0) {
      double x = std::log(p.lambda), y = std::log(r);
      sx += x; sy += y; sxx += x * x; sxy += x * y; ++n;
    }
  }
  if (s.points.empty()) s.min_ratio = 0.0;
  s.dispersion = s.min_ratio > 0 ? s.max_ratio / s.min_ratio : INFINITY;
  double den = n * sxx - sx * sx;
  s.trend_exponent = n > 1 && den > 0 ? (n * sxy - sx * sy) / den : 0.0;
}

SweepResult sweep_estimate(EstimateKind kind, const PotentialSpec& spec, const Source& f, const ProblemSpec& base,
                           const std::vector<double>& lambdas, const std::vector<double>& epsilons,
                           const Extras& extras) {
  if (lambdas.empty() || epsilons.empty()) throw Error("empty grid");
  std::vector<std::pair<double, double>> grid;
  for (double l : lambdas)
    for (double e : epsilons) grid.emplace_back(l, e);
  MeshPtr mesh = extras.mesh ? extras.mesh : default_mesh(base);
  check_hypotheses_for(kind, spec, *mesh, base.mode_cutoff);
  Extras ex = extras;
  ex.mesh = mesh;
  auto reps = parallel_map(grid.size(), [&](std::size_t i) {
    ProblemSpec p = base;
    p.lambda = grid[i].first;
    p.epsilon = grid[i].second;
    return verify_estimate(kind, spec, f, p, ex);
  });
  SweepResult s;
  for (std::size_t i = 0; i < grid.size(); ++i) s.points.push_back({grid[i].first, grid[i].second, reps[i], true, 0});
  summarize(s);
  return s;
}

SweepResult operator_norm_sweep(const PotentialSpec& spec, const ProblemSpec& base, const std::vector<double>& lambdas,
                                const std::vector<double>& epsilons, int max_iter, double tol) {
  if (max_iter <= 0) throw Error("no iterations");
  if (lambdas.empty() || epsilons.empty()) throw Error("empty grid");
  validate_spec(base);
  MeshPtr mesh = default_mesh(base);
  const auto& m = *mesh;
  const std::size_t N = m.size();
  auto ms = angular::modes(spec, base.d, base.mode_cutoff);
  std::vector<std::vector<cplx>> x(ms.size(), std::vector<cplx>(N, 1.0));
  auto norm2 = [&](const std::vector<std::vector<cplx>>& v) {
    double s = 0.0;
    for (const auto& a : v)
      for (std::size_t i = 0; i < N; ++i) s += m.weights[i] * std::norm(a[i]);
    return s;
  };
  // g -> r^{-1} R(z) r^{-1} g on reduced fields, one solve per mode
  auto apply = [&](const std::vector<std::vector<cplx>>& v, const ProblemSpec& p) {
    return parallel_map(ms.size(), [&](std::size_t k) {
      std::vector<cplx> h(N);
      for (std::size_t i = 0; i < N; ++i) h[i] = v[k][i] / m.nodes[i];
      auto op = effective_index(spec, ms[k], p);
      auto sol = solve_mode_fd(op, RadialField(mesh, h, ms[k], true), p);
      auto w = sol.u.to_reduced().values;
      for (std::size_t i = 0; i < N; ++i) w[i] /= m.nodes[i];
      return w;
    });
  };
  SweepResult s;
  for (double lam : lambdas)
    for (double eps : epsilons) {
      ProblemSpec p = base;
      p.lambda = lam;
      p.epsilon = eps;
      validate_spec(p);
      ProblemSpec pa = p;
      pa.sign = p.sign == Sign::plus ? Sign::minus : Sign::plus;
      double n0 = std::sqrt(norm2(x));
      for (auto& a : x)
        for (auto& v : a) v /= n0;
      double sigma = 0.0;
      bool conv = false;
      int it = 0;
      for (it = 1; it <= max_iter; ++it) {
        auto y = apply(x, p);
        double s2 = std::sqrt(norm2(y));
        auto z = apply(y, pa);
        double nz = std::sqrt(norm2(z));
        if (!(nz > 0)) break;
        for (auto& a : z)
          for (auto& v : a) v /= nz;
        x = std::move(z);
        if (it > 1 && std::abs(s2 - sigma) <= tol * s2) {
          sigma = s2;
          conv = true;
          break;
        }
        sigma = s2;
      }
      SweepPoint pt;
      pt.lambda = lam;
      pt.epsilon = eps;
      pt.report = make_report("operator_norm", sigma, 1.0, p, conv ? "power iteration converged" : "power iteration not converged");
      pt.converged = conv;
      pt.iterations = std::min(it, max_iter);
      s.points.push_back(pt);
    }
  summarize(s);
  return s;
}

}  // namespace maghelm::estimates
