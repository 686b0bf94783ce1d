#include "maghelm/radial_solver.hpp"

#include <cmath>
#include <numbers>

#include "maghelm/angular.hpp"
#include "maghelm/bessel.hpp"
#include "maghelm/linalg.hpp"
#include "maghelm/parallel.hpp"

namespace maghelm {

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

double sphere_area(int d) { return d == 2 ? 2.0 * pi : 4.0 * pi; }

bool near(double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(y)); }

// nonuniform central difference; end values come from the caller
std::vector<cplx> derivative(const RadialMesh& m, const std::vector<cplx>& w, cplx d0, cplx dN) {
  std::size_t N = m.size();
  std::vector<cplx> dw(N);
  dw[0] = d0;
  dw[N - 1] = dN;
  for (std::size_t i = 1; i + 1 < N; ++i) {
    double hm = m.h(i - 1), hp = m.h(i);
    dw[i] = (hm * hm * (w[i + 1] - w[i]) + hp * hp * (w[i] - w[i - 1])) / (hm * hp * (hm + hp));
  }
  return dw;
}

ModeSolution assemble(const EffectiveRadialOp& op, const RadialField& g, const ProblemSpec& problem,
                      std::vector<cplx> w, std::vector<cplx> dw, SolverKind kind) {
  const auto& mesh = *g.mesh;
  double c = half_dim(problem.d);
  std::vector<cplx> u(w.size()), du(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    double r = mesh.nodes[i], s = std::pow(r, -c);
    u[i] = s * w[i];
    du[i] = s * (dw[i] - c * w[i] / r);
  }
  ModeSolution sol;
  sol.u = RadialField(g.mesh, std::move(u), g.mode, false);
  sol.du = RadialField(g.mesh, std::move(du), g.mode, false);
  sol.mode = g.mode;
  sol.spec = problem;
  sol.solver = kind;
  sol.nu = op.nu_eff;
  return sol;
}

// plus-branch wavenumber; the minus branch is solved by conjugation
cplx k_plus(const ProblemSpec& p) {
  cplx k = std::sqrt(cplx(p.lambda, p.epsilon));
  if (k.imag() < 0) k = -k;
  return k;
}

std::vector<cplx> reduced_rhs(const RadialField& g, const ProblemSpec& problem) {
  RadialField r = g.to_reduced();
  std::vector<cplx> v = r.values;
  if (problem.sign == Sign::minus)
    for (auto& x : v) x = std::conj(x);
  return v;
}

void conj_if_minus(std::vector<cplx>& v, const ProblemSpec& p) {
  if (p.sign == Sign::minus)
    for (auto& x : v) x = std::conj(x);
}

}  // namespace

const char* to_string(SolverKind k) { return k == SolverKind::fd ? "fd" : "green"; }

const char* to_string(Profile p) {
  switch (p) {
    case Profile::annulus: return "annulus";
    case Profile::gaussian: return "gaussian";
    case Profile::bump: return "bump";
    case Profile::custom: return "custom";
  }
  return "?";
}

Profile profile_from_string(const std::string& s) {
  for (auto p : {Profile::annulus, Profile::gaussian, Profile::bump, Profile::custom})
    if (s == to_string(p)) return p;
  throw Error("unknown source profile '" + s + "'");
}

double Source::radial(double r) const {
  switch (profile) {
    case Profile::annulus:
      if (near(r, a) || near(r, b)) return 0.5 * amplitude;
      return (r > a && r < b) ? amplitude : 0.0;
    case Profile::gaussian: {
      double t = (r - center) / width;
      return amplitude * std::exp(-0.5 * t * t);
    }
    case Profile::bump: {
      if (r <= a || r >= b) return 0.0;
      double t = (2.0 * r - a - b) / (b - a);
      return amplitude * std::exp(1.0 - 1.0 / (1.0 - t * t));
    }
    case Profile::custom: return custom ? amplitude * custom(r) : 0.0;
  }
  return 0.0;
}

double Source::support_max() const {
  switch (profile) {
    case Profile::annulus:
    case Profile::bump: return b;
    case Profile::gaussian: return center + 9.0 * width;
    case Profile::custom: return INFINITY;
  }
  return INFINITY;
}

EffectiveRadialOp effective_index(const PotentialSpec& spec, const ModeIndex& mode, const ProblemSpec& problem) {
  if (!spec.radial_compatible()) throw Error("non-radial custom potential");
  if (mode.d != problem.d || spec.d != problem.d) throw Error("dimension mismatch");
  double nu2 = mode.nu_eff * mode.nu_eff;
  EffectiveRadialOp op;
  op.mode = mode;
  switch (spec.kind) {
    case PotentialKind::inverse_square: nu2 -= spec.nu1; break;
    case PotentialKind::coulomb_type:
      if (spec.alpha_exp == 2.0) nu2 -= spec.v_inf;
      else {
        double v = spec.v_inf, a = spec.alpha_exp;
        op.V_extra = [v, a](double r) { return v / std::pow(r, a); };
      }
      break;
    case PotentialKind::custom_radial:
      if (spec.v_radial) op.V_extra = spec.v_radial;
      break;
    default: break;
  }
  if (nu2 < 0.0) throw Error("index below critical");
  op.nu_eff = std::sqrt(nu2);
  op.mu_eff = nu2 - 0.25;
  return op;
}

Bundle decompose_rhs(const Source& f, const PotentialSpec& spec, const ProblemSpec& problem, const MeshPtr& mesh) {
  int d = problem.d;
  std::vector<HarmonicTerm> terms = f.harmonics;
  if (terms.empty()) terms.push_back({0, 0, std::sqrt(sphere_area(d))});
  for (const auto& t : terms) {
    int order = d == 2 ? std::abs(t.l) : t.l;
    if (order > problem.mode_cutoff) throw Error("mode index beyond mode_cutoff");
    if (d == 3 && (t.l < 0 || std::abs(t.m) > t.l)) throw Error("invalid harmonic labels");
  }
  std::vector<double> h(mesh->size());
  double c = half_dim(d);
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = f.radial(mesh->nodes[i]) * std::pow(mesh->nodes[i], c);
  Bundle out;
  for (const auto& md : angular::modes(spec, d, problem.mode_cutoff)) {
    cplx coef = 0.0;
    for (const auto& t : terms) coef += t.coef * std::conj(angular::overlap_with_harmonic(spec, md, t.l, t.m));
    if (std::abs(coef) < 1e-14) continue;
    std::vector<cplx> v(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) v[i] = coef * h[i];
    out.emplace_back(mesh, std::move(v), md, true);
  }
  return out;
}

ModeSolution solve_mode_fd(const EffectiveRadialOp& op, const RadialField& g, const ProblemSpec& problem) {
  const auto& m = *g.mesh;
  std::size_t N = m.size();
  std::vector<cplx> rhs = reduced_rhs(g, problem);
  cplx k = k_plus(problem), z(problem.lambda, problem.epsilon);
  auto coeff = [&](std::size_t i) {
    double r = m.nodes[i];
    return -op.mu_eff / (r * r) + op.v_extra(r) + z;
  };
  cplx beta_out = bessel::log_deriv_sqrt_hankel(op.nu_eff, k, m.r_max());
  cplx beta_in = op.V_extra ? cplx((op.nu_eff + 0.5) / m.r_min())
                            : bessel::log_deriv_sqrt_regular(op.nu_eff, k, m.r_min());
  std::vector<cplx> sub(N - 1), diag(N), sup(N - 1), b(N);
  for (std::size_t i = 0; i < N; ++i) b[i] = m.weights[i] * rhs[i];
  diag[0] = -1.0 / m.h(0) - beta_in + m.weights[0] * coeff(0);
  sup[0] = 1.0 / m.h(0);
  for (std::size_t i = 1; i + 1 < N; ++i) {
    sub[i - 1] = 1.0 / m.h(i - 1);
    sup[i] = 1.0 / m.h(i);
    diag[i] = -1.0 / m.h(i - 1) - 1.0 / m.h(i) + m.weights[i] * coeff(i);
  }
  sub[N - 2] = 1.0 / m.h(N - 2);
  diag[N - 1] = -1.0 / m.h(N - 2) + beta_out + m.weights[N - 1] * coeff(N - 1);
  std::vector<cplx> w;
  try {
    w = linalg::solve_tridiagonal(sub, diag, sup, b);
  } catch (const Error&) {
    throw Error("singular tridiagonal system at lambda=" + std::to_string(problem.lambda) +
                ", eps=" + std::to_string(problem.epsilon));
  }
  auto dw = derivative(m, w, beta_in * w[0], beta_out * w[N - 1]);
  conj_if_minus(w, problem);
  conj_if_minus(dw, problem);
  return assemble(op, g, problem, std::move(w), std::move(dw), SolverKind::fd);
}

ModeSolution solve_mode_green(const EffectiveRadialOp& op, const RadialField& g, const ProblemSpec& problem) {
  if (op.V_extra) throw Error("green solver needs V_extra = 0");
  const auto& m = *g.mesh;
  std::size_t N = m.size();
  std::vector<cplx> rhs = reduced_rhs(g, problem);
  cplx k = k_plus(problem);
  std::vector<cplx> phi(N), chi(N), dphi(N), dchi(N);
  for (std::size_t i = 0; i < N; ++i) {
    double r = m.nodes[i], sr = std::sqrt(r);
    auto j = bessel::J_with_deriv(op.nu_eff, k * r);
    auto h = bessel::H1_with_deriv(op.nu_eff, k * r);
    phi[i] = sr * j.value;
    chi[i] = sr * h.value;
    dphi[i] = 0.5 / sr * j.value + sr * k * j.deriv;
    dchi[i] = 0.5 / sr * h.value + sr * k * h.deriv;
  }
  // cumulative trapezoid: A(r) = int_{r_min}^r phi g, B(r) = int_r^{r_max} chi g
  std::vector<cplx> A(N, 0.0), B(N, 0.0);
  for (std::size_t i = 1; i < N; ++i) A[i] = A[i - 1] + 0.5 * m.h(i - 1) * (phi[i - 1] * rhs[i - 1] + phi[i] * rhs[i]);
  for (std::size_t i = N - 1; i-- > 0;) B[i] = B[i + 1] + 0.5 * m.h(i) * (chi[i] * rhs[i] + chi[i + 1] * rhs[i + 1]);
  const cplx c = pi / (2.0 * I);
  std::vector<cplx> w(N), dw(N);
  for (std::size_t i = 0; i < N; ++i) {
    w[i] = c * (chi[i] * A[i] + phi[i] * B[i]);
    dw[i] = c * (dchi[i] * A[i] + dphi[i] * B[i]);
  }
  conj_if_minus(w, problem);
  conj_if_minus(dw, problem);
  return assemble(op, g, problem, std::move(w), std::move(dw), SolverKind::green);
}

SolutionBundle resolve(const PotentialSpec& spec, const Bundle& g, const ProblemSpec& problem, SolverKind solver) {
  validate_spec(problem);
  return parallel_map(g.size(), [&](std::size_t i) {
    auto op = effective_index(spec, g[i].mode, problem);
    return solver == SolverKind::fd ? solve_mode_fd(op, g[i], problem) : solve_mode_green(op, g[i], problem);
  });
}

SolutionBundle resolve(const PotentialSpec& spec, const Source& f, const ProblemSpec& problem, const MeshPtr& mesh,
                       SolverKind solver) {
  return resolve(spec, decompose_rhs(f, spec, problem, mesh), problem, solver);
}

double h1_distance(const SolutionBundle& a, const SolutionBundle& b, double R) {
  double s = 0.0;
  for (const auto& x : a) {
    const ModeSolution* y = nullptr;
    for (const auto& c : b)
      if (c.mode == x.mode) y = &c;
    const auto& m = *x.u.mesh;
    int d = x.mode.d;
    for (std::size_t i = 0; i < m.size() && m.nodes[i] <= R; ++i) {
      cplx du = x.u.values[i] - (y ? y->u.values[i] : 0.0);
      cplx dd = x.du.values[i] - (y ? y->du.values[i] : 0.0);
      s += m.weights[i] * (std::norm(du) + std::norm(dd)) * std::pow(m.nodes[i], d - 1);
    }
  }
  for (const auto& y : b) {
    bool found = false;
    for (const auto& x : a) found = found || x.mode == y.mode;
    if (!found) {
      double n = h1_norm({y}, R);
      s += n * n;
    }
  }
  return std::sqrt(s);
}

double h1_norm(const SolutionBundle& a, double R) { return h1_distance(a, {}, R); }

LapResult limiting_absorption(const PotentialSpec& spec, const Source& f, const ProblemSpec& problem,
                              const MeshPtr& mesh, const std::vector<double>& eps_sequence, double R_loc) {
  if (!(problem.lambda > 0.0)) throw Error("limiting absorption needs lambda > 0");
  if (eps_sequence.empty()) throw Error("empty eps_sequence");
  for (std::size_t i = 0; i < eps_sequence.size(); ++i) {
    if (!(eps_sequence[i] > 0.0)) throw Error("eps_sequence must be positive");
    if (i > 0 && eps_sequence[i] > eps_sequence[i - 1]) throw Error("non-monotone eps_sequence");
  }
  LapResult res;
  res.eps = eps_sequence;
  auto g = decompose_rhs(f, spec, problem, mesh);
  for (double e : eps_sequence) {
    ProblemSpec p = problem;
    p.epsilon = e;
    res.solutions.push_back(resolve(spec, g, p));
  }
  ProblemSpec p0 = problem;
  p0.epsilon = 0.0;
  res.limit = resolve(spec, g, p0);
  if (!(R_loc > problem.r_min)) throw Error("R_loc must exceed r_min");
  res.R_loc = R_loc;
  double scale = std::max(h1_norm(res.limit, R_loc), 1e-300);
  for (std::size_t i = 0; i < res.solutions.size(); ++i) {
    res.limit_distances.push_back(h1_distance(res.solutions[i], res.limit, R_loc) / scale);
    if (i > 0) res.distances.push_back(h1_distance(res.solutions[i], res.solutions[i - 1], R_loc) / scale);
  }
  if (res.solutions.size() > 1) {
    // linear-in-eps error: L = (e1 u2 - e2 u1) / (e1 - e2)
    std::size_t n = res.solutions.size();
    double e1 = res.eps[n - 2], e2 = res.eps[n - 1];
    if (e1 > e2) {
      SolutionBundle ex = res.solutions[n - 1];
      for (std::size_t k = 0; k < ex.size(); ++k) {
        const auto& u1 = res.solutions[n - 2][k];
        for (std::size_t i = 0; i < ex[k].u.size(); ++i) {
          ex[k].u.values[i] = (e1 * ex[k].u.values[i] - e2 * u1.u.values[i]) / (e1 - e2);
          ex[k].du.values[i] = (e1 * ex[k].du.values[i] - e2 * u1.du.values[i]) / (e1 - e2);
        }
      }
      res.extrapolated_distance = h1_distance(ex, res.limit, R_loc) / scale;
    }
  }
  res.monotone = true;
  res.geometric = !res.distances.empty();
  for (std::size_t i = 1; i < res.distances.size(); ++i) {
    if (res.distances[i] > res.distances[i - 1]) res.monotone = false;
    if (!(res.distances[i] <= 0.9 * res.distances[i - 1])) res.geometric = false;
  }
  return res;
}

}  // namespace maghelm
