#include "maghelm/potentials.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "maghelm/angular.hpp"
#include "maghelm/linalg.hpp"

namespace maghelm {

namespace {

double norm(const Point& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

void require_nonzero(const Point& x) {
  if (norm(x) == 0.0) throw Error("x = 0");
}

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Matrix zeros(int d) { return Matrix(d, std::vector<double>(d, 0.0)); }

}  // namespace

const char* to_string(PotentialKind k) {
  switch (k) {
    case PotentialKind::free: return "free";
    case PotentialKind::monopole: return "monopole";
    case PotentialKind::aharonov_bohm: return "aharonov_bohm";
    case PotentialKind::inverse_square: return "inverse_square";
    case PotentialKind::coulomb_type: return "coulomb_type";
    case PotentialKind::custom_radial: return "custom_radial";
    case PotentialKind::custom_field: return "custom_field";
  }
  return "?";
}

PotentialKind potential_kind_from_string(const std::string& s) {
  for (auto k : {PotentialKind::free, PotentialKind::monopole, PotentialKind::aharonov_bohm,
                 PotentialKind::inverse_square, PotentialKind::coulomb_type, PotentialKind::custom_radial,
                 PotentialKind::custom_field})
    if (s == to_string(k)) return k;
  throw Error("unknown potential kind '" + s + "'");
}

double PotentialSpec::V_r(double r) const {
  switch (kind) {
    case PotentialKind::inverse_square: return nu1 / (r * r);
    case PotentialKind::coulomb_type: return v_inf / std::pow(r, alpha_exp);
    case PotentialKind::custom_radial: return v_radial ? v_radial(r) : 0.0;
    default: return 0.0;
  }
}

double PotentialSpec::dV_r(double r) const {
  switch (kind) {
    case PotentialKind::inverse_square: return -2.0 * nu1 / (r * r * r);
    case PotentialKind::coulomb_type: return -alpha_exp * v_inf / std::pow(r, alpha_exp + 1.0);
    case PotentialKind::custom_radial: {
      if (!v_radial) return 0.0;
      double h = 1e-5 * r;
      return (v_radial(r + h) - v_radial(r - h)) / (2.0 * h);
    }
    default: return 0.0;
  }
}

double PotentialSpec::V(const Point& x) const { return V_r(norm(x)); }

Point PotentialSpec::A(const Point& x) const {
  Point a(x.size(), 0.0);
  switch (kind) {
    case PotentialKind::monopole: {
      double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
      a[0] = -C * x[1] / r2;
      a[1] = C * x[0] / r2;
      break;
    }
    case PotentialKind::aharonov_bohm: {
      double rho2 = x[0] * x[0] + x[1] * x[1];
      if (rho2 == 0.0) throw Error("A-B field singular on the axis");
      a[0] = -alpha * x[1] / rho2;
      a[1] = alpha * x[0] / rho2;
      break;
    }
    case PotentialKind::custom_radial:
      if (a_radial) {
        double s = a_radial(norm(x));
        for (std::size_t j = 0; j < x.size(); ++j) a[j] = s * x[j];
      }
      break;
    case PotentialKind::custom_field:
      a = a_field(x);
      if (a.size() != x.size()) throw Error("custom field has wrong dimension");
      break;
    default: break;
  }
  return a;
}

bool PotentialSpec::radial_compatible() const { return kind != PotentialKind::custom_field; }

std::string PotentialSpec::describe() const {
  std::string d_s = ",d=" + std::to_string(d);
  switch (kind) {
    case PotentialKind::free: return "free(" + d_s.substr(1) + ")";
    case PotentialKind::monopole: return "monopole(C=" + fmt(C) + d_s + ")";
    case PotentialKind::aharonov_bohm: return "aharonov_bohm(alpha=" + fmt(alpha) + d_s + ")";
    case PotentialKind::inverse_square: return "inverse_square(nu1=" + fmt(nu1) + d_s + ")";
    case PotentialKind::coulomb_type:
      return "coulomb_type(v_inf=" + fmt(v_inf) + ",alpha_exp=" + fmt(alpha_exp) + d_s + ")";
    case PotentialKind::custom_radial: return "custom_radial(" + custom_name + d_s + ")";
    case PotentialKind::custom_field: return "custom_field(" + custom_name + d_s + ")";
  }
  return "?";
}

PotentialSpec build_example(PotentialKind kind, const std::map<std::string, double>& params, int d) {
  if (d != 2 && d != 3) throw Error("unsupported dimension");
  PotentialSpec s;
  s.kind = kind;
  s.d = d;
  auto take = [&](const char* key, double def) {
    auto it = params.find(key);
    double v = it == params.end() ? def : it->second;
    if (!std::isfinite(v)) throw Error(std::string("non-finite parameter '") + key + "'");
    return v;
  };
  std::vector<std::string> allowed;
  switch (kind) {
    case PotentialKind::free: break;
    case PotentialKind::monopole:
      if (d != 3) throw Error("monopole requires d = 3");
      s.C = take("C", 1.0);
      allowed = {"C"};
      break;
    case PotentialKind::aharonov_bohm:
      s.alpha = take("alpha", 0.5);
      allowed = {"alpha"};
      break;
    case PotentialKind::inverse_square:
      s.nu1 = take("nu1", 0.2);
      allowed = {"nu1"};
      s.satisfies_h1h2 = s.nu1 < 0.25 * (d - 2) * (d - 2);
      break;
    case PotentialKind::coulomb_type:
      s.v_inf = take("v_inf", -1.0);
      s.alpha_exp = take("alpha_exp", 1.0);
      allowed = {"v_inf", "alpha_exp"};
      if (!(s.alpha_exp > 0.0 && s.alpha_exp <= 2.0)) throw Error("alpha_exp must lie in (0, 2]");
      s.satisfies_h1h2 = s.v_inf <= 0.0 && s.alpha_exp >= 1.0;
      break;
    case PotentialKind::custom_radial:
    case PotentialKind::custom_field: throw Error("custom potentials are built from functions");
  }
  for (const auto& [k, v] : params)
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw Error("unknown parameter '" + k + "' for " + to_string(kind));
  return s;
}

PotentialSpec custom_radial(std::function<double(double)> v, std::function<double(double)> a, int d,
                            std::string name) {
  PotentialSpec s;
  s.kind = PotentialKind::custom_radial;
  s.d = d;
  s.v_radial = std::move(v);
  s.a_radial = std::move(a);
  s.custom_name = std::move(name);
  return s;
}

PotentialSpec custom_field(std::function<Point(const Point&)> a, int d, std::string name) {
  PotentialSpec s;
  s.kind = PotentialKind::custom_field;
  s.d = d;
  s.a_field = std::move(a);
  s.custom_name = std::move(name);
  return s;
}

Matrix magnetic_field_fd(const PotentialSpec& spec, const Point& x) {
  require_nonzero(x);
  int d = (int)x.size();
  double h = 1e-6 * norm(x);
  // J[k][j] = dA_k/dx_j
  Matrix J = zeros(d);
  for (int j = 0; j < d; ++j) {
    Point xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    Point ap = spec.A(xp), am = spec.A(xm);
    for (int k = 0; k < d; ++k) J[k][j] = (ap[k] - am[k]) / (2.0 * h);
  }
  Matrix B = zeros(d);
  for (int k = 0; k < d; ++k)
    for (int j = k + 1; j < d; ++j) {
      B[k][j] = J[k][j] - J[j][k];
      B[j][k] = -B[k][j];
    }
  return B;
}

Matrix magnetic_field(const PotentialSpec& spec, const Point& x) {
  require_nonzero(x);
  int d = (int)x.size();
  switch (spec.kind) {
    case PotentialKind::monopole: {
      double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
      double s = 2.0 * spec.C * x[2] / (r2 * r2);
      double c1 = s * x[0], c2 = s * x[1], c3 = s * x[2];
      return {{0.0, -c3, c2}, {c3, 0.0, -c1}, {-c2, c1, 0.0}};
    }
    case PotentialKind::aharonov_bohm:
      if (x[0] == 0.0 && x[1] == 0.0) throw Error("A-B field singular on the axis");
      return zeros(d);
    case PotentialKind::free:
    case PotentialKind::inverse_square:
    case PotentialKind::coulomb_type: return zeros(d);
    default: return magnetic_field_fd(spec, x);
  }
}

Point tangential_field(const PotentialSpec& spec, const Point& x) {
  Matrix B = magnetic_field(spec, x);
  double r = norm(x);
  int d = (int)x.size();
  Point t(d, 0.0);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) t[j] += x[k] / r * B[k][j];
  return t;
}

double divergence_fd(const PotentialSpec& spec, const Point& x) {
  require_nonzero(x);
  double h = 1e-6 * norm(x), s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    Point xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    s += (spec.A(xp)[j] - spec.A(xm)[j]) / (2.0 * h);
  }
  return s;
}

std::optional<double> cromstrom_gauge(const PotentialSpec& spec, const Point& x) {
  require_nonzero(x);
  int d = (int)x.size();
  // t = e^{-s}; integrals over s in [0, S] for S = ln 1e4, ln 1e8, ln 1e12
  static const linalg::GaussRule g = linalg::gauss_legendre(16, 0.0, 1.0);
  const double S[3] = {4.0 * std::log(10.0), 8.0 * std::log(10.0), 12.0 * std::log(10.0)};
  std::vector<std::vector<double>> I(3, std::vector<double>(d, 0.0));
  std::vector<double> acc(d, 0.0);
  double s0 = 0.0;
  for (int level = 0; level < 3; ++level) {
    int panels = (int)std::ceil((S[level] - s0) * 2.0);
    double w = (S[level] - s0) / panels;
    for (int p = 0; p < panels; ++p)
      for (std::size_t q = 0; q < g.x.size(); ++q) {
        double s = s0 + (p + g.x[q]) * w, t = std::exp(-s);
        Point y(d);
        for (int j = 0; j < d; ++j) y[j] = t * x[j];
        Point a = spec.A(y);
        for (int j = 0; j < d; ++j) acc[j] += g.w[q] * w * t * a[j];
      }
    I[level] = acc;
    s0 = S[level];
  }
  double m = 0.0;
  for (int j = 0; j < d; ++j) {
    double d1 = I[1][j] - I[0][j], d2 = I[2][j] - I[1][j];
    if (std::abs(d2) > 1e-6 * (1.0 + std::abs(I[2][j])) && std::abs(d2) > 0.5 * std::abs(d1)) return std::nullopt;
    m += x[j] * I[2][j];
  }
  return m;
}

QuotientResult max_rayleigh_quotient(const RadialMesh& mesh, double nu0, const std::vector<double>& weight,
                                     double tol, int max_iter) {
  std::size_t N = mesh.size();
  if (weight.size() != N) throw Error("weight length differs from mesh");
  std::size_t n = N - 2;
  std::vector<double> diag(n), off(n - 1), M(n);
  double c = nu0 * nu0 - 0.25;
  bool any = false;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t i = k + 1;
    double r = mesh.nodes[i];
    diag[k] = 1.0 / mesh.h(i - 1) + 1.0 / mesh.h(i) + mesh.weights[i] * c / (r * r);
    if (k + 1 < n) off[k] = -1.0 / mesh.h(i);
    M[k] = mesh.weights[i] * weight[i];
    if (M[k] < 0) throw Error("negative quotient weight");
    if (M[k] > 0) any = true;
  }
  QuotientResult res;
  if (!any) {
    res.converged = true;
    return res;
  }
  auto Kdot = [&](const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      double ky = diag[k] * y[k];
      if (k > 0) ky += off[k - 1] * y[k - 1];
      if (k + 1 < n) ky += off[k] * y[k + 1];
      s += y[k] * ky;
    }
    return s;
  };
  std::vector<double> x(n, 1.0), rhs(n);
  double prev = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    for (std::size_t k = 0; k < n; ++k) rhs[k] = M[k] * x[k];
    std::vector<double> y = linalg::solve_tridiagonal(off, diag, off, rhs);
    double num = 0.0, big = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      num += M[k] * y[k] * y[k];
      big = std::max(big, std::abs(y[k]));
    }
    double den = Kdot(y);
    res.iterations = it;
    if (!(den > 0.0) || !std::isfinite(num)) {
      res.indefinite = true;
      res.value = INFINITY;
      return res;
    }
    double R = num / den;
    for (std::size_t k = 0; k < n; ++k) x[k] = y[k] / big;
    res.value = R;
    if (it > 1 && std::abs(R - prev) <= tol * std::abs(R)) {
      res.converged = true;
      return res;
    }
    prev = R;
  }
  return res;
}

RadialMesh hardy_mesh(int n, double log_half_range) {
  return RadialMesh::logarithmic(std::exp(-log_half_range), std::exp(log_half_range), n);
}

namespace {

struct WeightedConstants {
  double nu = 0, av = 0, ab2 = 0;
  bool unbounded = false;
};

WeightedConstants weighted_constants(const PotentialSpec& spec, const RadialMesh& mesh, double nu0) {
  std::size_t N = mesh.size();
  std::vector<double> wv(N), wa(N);
  for (std::size_t i = 0; i < N; ++i) {
    double r = mesh.nodes[i];
    double V = spec.V_r(r);
    wv[i] = std::max(V, 0.0);
    wa[i] = std::max(-(V + r * spec.dV_r(r)), 0.0);
  }
  WeightedConstants c;
  auto a = max_rayleigh_quotient(mesh, nu0, wv);
  auto b = max_rayleigh_quotient(mesh, nu0, wa);
  c.nu = a.value;
  c.av = b.value;
  c.unbounded = a.indefinite || b.indefinite;
  return c;  // r^2 |B_tau|^2 vanishes for every radial-compatible kind
}

double h3_profile(const PotentialSpec& spec, double r) {
  double g = std::abs(spec.V_r(r));
  std::vector<Point> dirs;
  if (spec.d == 2) dirs = {{1.0, 0.0}, {0.6, 0.8}};
  else dirs = {{0.6, 0.0, 0.8}, {0.48, 0.64, 0.6}, {0.0, 0.8, -0.6}};
  double bt = 0.0;
  for (auto& u : dirs) {
    Point x = u;
    for (auto& v : x) v *= r;
    Point t = tangential_field(spec, x);
    bt = std::max(bt, norm(t));
  }
  return g + bt;
}

std::mutex hyp_mu;
std::map<std::string, HypothesisReport> hyp_cache;

}  // namespace

HypothesisReport check_hypotheses(const PotentialSpec& spec, const RadialMesh& mesh, int mode_cutoff) {
  if (!spec.radial_compatible()) throw Error("non-radial custom potential");
  std::string key;
  if (spec.kind != PotentialKind::custom_radial) {
    key = spec.describe() + "|" + std::to_string(mesh.size()) + "|" + fmt(mesh.r_min()) + "|" + fmt(mesh.r_max()) +
          "|" + std::to_string(mode_cutoff);
    std::lock_guard<std::mutex> lock(hyp_mu);
    auto it = hyp_cache.find(key);
    if (it != hyp_cache.end()) return it->second;
  }

  // the quotient decreases with nu0, so the smallest magnetic index is extremal
  auto ms = angular::modes(spec, spec.d, mode_cutoff);
  double nu0 = INFINITY;
  for (const auto& m : ms) nu0 = std::min(nu0, m.nu_eff);

  HypothesisReport rep;
  auto base = weighted_constants(spec, mesh, nu0);
  auto fine = weighted_constants(spec, mesh.refined(), nu0);
  double lo = mesh.r_min(), hi = mesh.r_max();
  auto wide = weighted_constants(spec, RadialMesh::logarithmic(lo * lo, hi * hi, 2 * (int)mesh.size() - 1), nu0);
  auto grows = [](double a, double b) { return b > 1.5 * a && b > 1e-12; };
  bool unbounded = base.unbounded || fine.unbounded || wide.unbounded || grows(base.av, wide.av) ||
                   grows(base.nu, wide.nu);
  auto close = [](double a, double b) { return std::abs(a - b) <= 0.02 * std::max({std::abs(a), std::abs(b), 1e-300}); };
  rep.nu = unbounded && grows(base.nu, wide.nu) ? INFINITY : fine.nu;
  rep.A_V = unbounded && grows(base.av, wide.av) ? INFINITY : fine.av;
  if (base.unbounded || fine.unbounded || wide.unbounded) rep.nu = rep.A_V = INFINITY;
  rep.A_B = std::sqrt(fine.ab2);
  rep.stable = !unbounded && close(base.av, fine.av) && close(base.nu, fine.nu);
  rep.satisfied = rep.stable && rep.A_V + 2.0 * rep.A_B < 1.0;
  std::ostringstream notes;
  notes << "discrete best constants; nu0=" << fmt(nu0) << "; mesh N=" << mesh.size() << " and refined";
  if (unbounded) notes << "; quotient grows with the domain (unbounded)";

  // (H3): largest alpha with bounded weighted profile on both sides
  const double alphas[] = {1.0, 0.5, 0.25, 0.1, 0.05};
  std::vector<double> rs;
  for (int i = 0; i <= 1600; ++i) rs.push_back(std::pow(10.0, -8.0 + i * 0.01));
  std::vector<double> g(rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) g[i] = h3_profile(spec, rs[i]);
  rep.h3_ok = false;
  double worst_r = 0.0;
  for (double a : alphas) {
    double in_edge = 0, in_core = 0, out_edge = 0, out_core = 0, r_in = 0, r_out = 0;
    for (std::size_t i = 0; i < rs.size(); ++i) {
      double r = rs[i];
      if (r <= 1.0) {
        double h = g[i] * std::pow(r, 2.0 - a);
        if (r < 1e-6) {
          if (h > in_edge) { in_edge = h; r_in = r; }
        } else in_core = std::max(in_core, h);
      }
      if (r >= 1.0) {
        double h = g[i] * std::pow(r, 3.0 + a);
        if (r > 1e6) {
          if (h > out_edge) { out_edge = h; r_out = r; }
        } else out_core = std::max(out_core, h);
      }
    }
    bool in_ok = in_edge <= 1.01 * in_core + 1e-300;
    bool out_ok = out_edge <= 1.01 * out_core + 1e-300;
    if (in_ok && out_ok) {
      rep.h3_ok = true;
      rep.h3_alpha = a;
      rep.h3_C = std::max({in_core, in_edge, out_core, out_edge});
      rep.h3_c = spec.d > 3 ? rep.h3_C : 0.0;
      break;
    }
    if (worst_r == 0.0) worst_r = in_ok ? r_out : r_in;
  }
  if (!rep.h3_ok) rep.h3_violation_r = worst_r;
  rep.notes = notes.str();

  if (!key.empty()) {
    std::lock_guard<std::mutex> lock(hyp_mu);
    hyp_cache.emplace(key, rep);
  }
  return rep;
}

}  // namespace maghelm
