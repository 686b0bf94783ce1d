#include "maghelm/identities.hpp"

#include <algorithm>
#include <cmath>

namespace maghelm::identities {

const char* to_string(MultiplierKind k) {
  switch (k) {
    case MultiplierKind::quadratic: return "quadratic";
    case MultiplierKind::cubic: return "cubic";
    case MultiplierKind::piecewise: return "piecewise";
    case MultiplierKind::custom: return "custom";
  }
  return "?";
}

MultiplierKind multiplier_from_string(const std::string& s) {
  if (s == "quadratic") return MultiplierKind::quadratic;
  if (s == "cubic") return MultiplierKind::cubic;
  if (s == "piecewise") return MultiplierKind::piecewise;
  if (s == "custom") return MultiplierKind::custom;
  throw Error("unknown multiplier '" + s + "'");
}

MultiplierSamples multiplier_eval(const MultiplierSpec& m, const RadialMesh& mesh) {
  const std::size_t n = mesh.size();
  MultiplierSamples s;
  s.psi1.resize(n);
  s.psi2.resize(n);
  s.psi1_over_r.resize(n);
  s.d_psi1_over_r.resize(n);
  std::size_t kink = n;
  if (m.kind == MultiplierKind::piecewise) {
    if (!(m.R1 > 0)) throw Error("piecewise multiplier needs R1 > 0");
    if (m.R1 < mesh.r_max()) {
      kink = mesh.nearest(m.R1);
      if (std::abs(mesh.nodes[kink] - m.R1) > 1e-12 * m.R1) throw Error("multiplier kink not on a mesh node");
    }
  }
  if (m.kind == MultiplierKind::custom && !m.custom_dpsi) throw Error("custom multiplier needs psi'");
  for (std::size_t i = 0; i < n; ++i) {
    double r = mesh.nodes[i];
    switch (m.kind) {
      case MultiplierKind::quadratic: s.psi1[i] = r; s.psi2[i] = 1.0; break;
      case MultiplierKind::cubic: s.psi1[i] = r * r; s.psi2[i] = 2.0 * r; break;
      case MultiplierKind::piecewise:
        if (r <= m.R1) { s.psi1[i] = r * r; s.psi2[i] = 2.0 * r; }
        else { s.psi1[i] = m.R1 * r; s.psi2[i] = m.R1; }
        if (i == kink) s.psi2[i] = 1.5 * m.R1;
        break;
      case MultiplierKind::custom: {
        double h = 1e-6 * r;
        double a = m.custom_dpsi(r - h), b = m.custom_dpsi(r + h), c = m.custom_dpsi(r);
        if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) throw Error("custom psi' not finite");
        if (std::abs(b - a) > 1e-4 * (1.0 + std::abs(c))) throw Error("custom psi' is not continuous");
        s.psi1[i] = c;
        s.psi2[i] = (b - a) / (2.0 * h);
        break;
      }
    }
    if (r <= 1.0 && std::abs(s.psi1[i]) > r * (1.0 + 1e-12)) throw Error("multiplier violates |psi'| <= r for r <= 1");
    s.psi1_over_r[i] = s.psi1[i] / r;
    s.d_psi1_over_r[i] = s.psi2[i] / r - s.psi1[i] / (r * r);
  }
  return s;
}

TestFunction constant_test_function(double c) {
  return {[c](double) { return c; }, [](double) { return 0.0; }};
}

namespace {

struct ModeView {
  const RadialMesh* mesh;
  std::vector<cplx> u, du, f;  // plain profiles, plus-branch orientation
  double lambda_t;             // tangential eigenvalue
  int d;
};

// Minus-branch solutions are conjugates of plus-branch ones with conjugate data.
std::vector<ModeView> views(const SolutionBundle& u, const Bundle& f, bool conj_minus) {
  if (u.size() != f.size()) throw Error("solution and source bundles differ in size");
  std::vector<ModeView> out;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (!(u[k].mode == f[k].mode)) throw Error("solution and source modes differ");
    RadialField fp = f[k].to_plain();
    ModeView v{u[k].u.mesh.get(), u[k].u.values, u[k].du.values, fp.values, u[k].mode.tangential, u[k].mode.d};
    if (v.f.size() != v.u.size()) throw Error("solution and source meshes differ");
    if (conj_minus && u[k].spec.sign == Sign::minus) {
      for (auto* a : {&v.u, &v.du, &v.f})
        for (auto& z : *a) z = std::conj(z);
    }
    out.push_back(std::move(v));
  }
  return out;
}

void check_radial(const PotentialSpec& spec) {
  if (!spec.radial_compatible()) throw Error("identity needs a radially compatible potential");
}

void finish(IdentityResidual& r) {
  r.residual = r.lhs - r.rhs;
  double s = 0.0;
  for (const auto& [k, v] : r.terms) s += std::abs(v);
  r.scale = s;
  r.relative = s > 0 ? std::abs(r.residual) / s : std::abs(r.residual);
}

}  // namespace

std::pair<IdentityResidual, IdentityResidual> symmetric_antisymmetric_residuals(const SolutionBundle& u,
                                                                                const Bundle& f,
                                                                                const TestFunction& phi,
                                                                                const PotentialSpec& spec,
                                                                                const ProblemSpec& problem) {
  check_radial(spec);
  if (!phi.phi || !phi.dphi) throw Error("test function incomplete");
  IdentityResidual re, im;
  re.id = "energy_real";
  im.id = "energy_imag";
  double sg = problem.sign == Sign::plus ? 1.0 : -1.0;
  double lam = 0, grad = 0, pot = 0, cross_re = 0, bd_re = 0, f_re = 0;
  double eps_t = 0, cross_im = 0, bd_im = 0, f_im = 0;
  for (const auto& v : views(u, f, false)) {
    const auto& m = *v.mesh;
    std::size_t n = m.size();
    std::vector<double> a(n), b(n), c(n), e(n), g(n), h(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      double r = m.nodes[i], w = std::pow(r, v.d - 1), ph = phi.phi(r), dph = phi.dphi(r);
      double u2 = std::norm(v.u[i]);
      cplx cr = v.du[i] * std::conj(v.u[i]), fu = v.f[i] * std::conj(v.u[i]);
      a[i] = ph * u2 * w;
      b[i] = ph * (std::norm(v.du[i]) + v.lambda_t * u2 / (r * r)) * w;
      c[i] = ph * spec.V_r(r) * u2 * w;
      e[i] = dph * cr.real() * w;
      g[i] = ph * fu.real() * w;
      h[i] = dph * cr.imag() * w;
      p[i] = ph * fu.imag() * w;
    }
    auto bd = [&](std::size_t i) {
      double r = m.nodes[i];
      return std::pow(r, v.d - 1) * phi.phi(r) * v.du[i] * std::conj(v.u[i]);
    };
    cplx B = bd(n - 1) - bd(0);
    double A = m.integrate(a);
    lam += problem.lambda * A;
    grad += m.integrate(b);
    pot += m.integrate(c);
    cross_re += m.integrate(e);
    bd_re += B.real();
    f_re += m.integrate(g);
    eps_t += sg * problem.epsilon * A;
    cross_im += m.integrate(h);
    bd_im += B.imag();
    f_im += m.integrate(p);
  }
  re.terms = {{"lambda", lam}, {"gradient", -grad}, {"potential", pot}, {"cross", -cross_re},
              {"boundary", bd_re}, {"source", f_re}};
  re.boundary_correction = bd_re;
  re.lhs = lam - grad + pot - cross_re + bd_re;
  re.rhs = f_re;
  finish(re);
  im.terms = {{"eps", eps_t}, {"cross", -cross_im}, {"boundary", bd_im}, {"source", f_im}};
  im.boundary_correction = bd_im;
  im.lhs = eps_t - cross_im + bd_im;
  im.rhs = f_im;
  finish(im);
  return {re, im};
}

IdentityResidual morawetz_residual(const SolutionBundle& u, const Bundle& f, const MultiplierSpec& mult,
                                   const PotentialSpec& spec, const ProblemSpec& problem) {
  check_radial(spec);
  if (!(problem.lambda > 0)) throw Error("multiplier identity needs lambda > 0");
  IdentityResidual res;
  res.id = std::string("morawetz_") + to_string(mult.kind);
  const double s = std::sqrt(problem.lambda), eps = problem.epsilon, es = eps / (2.0 * s);
  const cplx is(0.0, s);
  std::map<std::string, double> t;
  double flux = 0.0, v_alt = 0.0;
  for (const auto& v : views(u, f, true)) {
    const auto& m = *v.mesh;
    const std::size_t n = m.size();
    const double dm1 = v.d - 1.0;
    auto ms = multiplier_eval(mult, m);
    std::vector<std::vector<double>> c(12, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      double r = m.nodes[i], w = std::pow(r, v.d - 1);
      double p1 = ms.psi1[i], p2 = ms.psi2[i];
      cplx U = v.u[i], P = v.du[i], F = v.f[i];
      double u2 = std::norm(U), tang = v.lambda_t * u2 / (r * r);
      double shift2 = std::norm(P - is * U);
      double cr = (P * std::conj(U)).real();
      double V = spec.V_r(r), dV = spec.dV_r(r);
      c[0][i] = 0.5 * p2 * shift2 * w;
      c[1][i] = (ms.psi1_over_r[i] - 0.5 * p2) * tang * w;
      c[2][i] = 0.5 * dm1 * ms.d_psi1_over_r[i] * cr * w;
      c[3][i] = es * p1 * (shift2 + tang) * w;
      c[4][i] = 0.0;  // tangential field vanishes for radial gauges
      c[5][i] = 0.5 * (p2 * V + p1 * dV) * u2 * w;
      c[6][i] = es * p2 * cr * w;
      c[7][i] = -es * p1 * V * u2 * w;
      c[8][i] = -es * p1 * (F * std::conj(U)).real() * w;
      c[9][i] = -(F * p1 * (std::conj(P) + is * std::conj(U))).real() * w;
      c[10][i] = -0.5 * dm1 * ms.psi1_over_r[i] * (F * std::conj(U)).real() * w;
      // d/dr (r V) by central difference
      double hh = 1e-5 * r;
      c[11][i] = 0.5 * ((r + hh) * spec.V_r(r + hh) - (r - hh) * spec.V_r(r - hh)) / (2.0 * hh) * u2 * w;
    }
    static const char* names[11] = {"shifted_radial", "angular", "curvature", "eps_gradient", "tangential_field",
                                    "potential", "eps_cross", "eps_potential", "rhs_eps", "rhs_main", "rhs_curvature"};
    for (int k = 0; k < 11; ++k) t[names[k]] += m.integrate(c[k]);
    v_alt += m.integrate(c[11]);
    auto Q = [&](std::size_t i) {
      double r = m.nodes[i], w = std::pow(r, v.d - 1), p1 = ms.psi1[i];
      cplx U = v.u[i], P = v.du[i];
      cplx pu = P * std::conj(U);
      return w * (0.5 * p1 * std::norm(P) +
                  (0.5 * (problem.lambda + spec.V_r(r)) - 0.5 * v.lambda_t / (r * r)) * p1 * std::norm(U) +
                  (dm1 / (2.0 * r) + es) * p1 * pu.real() - s * p1 * pu.imag());
    };
    flux += Q(n - 1) - Q(0);
  }
  double L = 0.0, R = 0.0;
  for (const auto& [k, v] : t) (k.rfind("rhs_", 0) == 0 ? R : L) += v;
  t["flux"] = -flux;
  res.terms = t;
  res.terms.erase("tangential_field");
  res.boundary_correction = flux;
  res.lhs = L - flux;
  res.rhs = R;
  finish(res);
  res.terms["tangential_field"] = t["tangential_field"];
  res.terms["potential_alt"] = v_alt;
  return res;
}

IdentityResidual alpha1_residual(const SolutionBundle& u, const Bundle& f, const PotentialSpec& spec,
                                 const ProblemSpec& problem) {
  if (spec.kind != PotentialKind::free) throw Error("cubic-multiplier identity is for the free operator");
  if (!(problem.lambda > 0)) throw Error("multiplier identity needs lambda > 0");
  IdentityResidual res;
  res.id = "alpha1";
  const double s = std::sqrt(problem.lambda), eps = problem.epsilon, e4 = eps / (4.0 * s);
  const cplx is(0.0, s);
  double l1 = 0, l2 = 0, r1 = 0, r2 = 0, r3 = 0, flux = 0;
  for (const auto& v : views(u, f, true)) {
    const auto& m = *v.mesh;
    const std::size_t n = m.size();
    const double dm1 = v.d - 1.0;
    std::vector<std::vector<double>> c(5, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      double r = m.nodes[i], w = std::pow(r, v.d - 1);
      cplx U = v.u[i], P = v.du[i], F = v.f[i];
      double u2 = std::norm(U);
      c[0][i] = 0.5 * r * std::norm(P - is * U + dm1 * U / (2.0 * r)) * w;
      c[1][i] = e4 * r * r * (std::norm(P - is * U) + v.lambda_t * u2 / (r * r)) * w;
      c[2][i] = v.d * e4 * u2 * w;
      c[3][i] = -0.5 * (F * r * r * (std::conj(P) + is * std::conj(U) + dm1 * std::conj(U) / (2.0 * r))).real() * w;
      c[4][i] = -e4 * r * r * (F * std::conj(U)).real() * w;
    }
    l1 += m.integrate(c[0]);
    l2 += m.integrate(c[1]);
    r1 += m.integrate(c[2]);
    r2 += m.integrate(c[3]);
    r3 += m.integrate(c[4]);
    auto Q = [&](std::size_t i) {
      double r = m.nodes[i], w = std::pow(r, v.d - 1), p1 = r * r;
      cplx U = v.u[i], P = v.du[i], pu = P * std::conj(U);
      double u2 = std::norm(U);
      double q = w * (0.5 * p1 * std::norm(P) + (0.5 * problem.lambda - 0.5 * v.lambda_t / (r * r)) * p1 * u2 +
                      (dm1 / (2.0 * r) + 2.0 * e4) * p1 * pu.real() - s * p1 * pu.imag());
      return 0.5 * (q + 0.25 * dm1 * w * u2 - 2.0 * e4 * std::pow(r, v.d) * u2);
    };
    flux += Q(n - 1) - Q(0);
  }
  res.terms = {{"shifted", l1}, {"eps_gradient", l2}, {"mass", r1}, {"rhs_main", r2}, {"rhs_eps", r3},
               {"flux", -flux}};
  res.boundary_correction = flux;
  res.lhs = l1 + l2 - flux;
  res.rhs = r1 + r2 + r3;
  finish(res);
  return res;
}

}  // namespace maghelm::identities
