#include "maghelm/farfield.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "maghelm/angular.hpp"
#include "maghelm/parallel.hpp"

namespace maghelm::farfield {

namespace {

std::size_t node_of(const RadialMesh& m, double r) {
  std::size_t i = m.nearest(r);
  if (std::abs(m.nodes[i] - r) > 1e-9 * std::max(1.0, r)) throw Error("radius not on the mesh");
  return i;
}

double lambda_of(const SolutionBundle& u) {
  double lam = u.front().spec.lambda;
  if (!(lam > 0)) throw Error("far field needs lambda > 0");
  return lam;
}

// least-squares slope of y against x
double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double n = (double)x.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i];
  }
  double den = n * sxx - sx * sx;
  return den > 0 ? (n * sxy - sx * sy) / den : 0.0;
}

// Neville extrapolation to x = 0
cplx extrapolate(const std::vector<double>& x, std::vector<cplx> y) {
  std::size_t n = x.size();
  for (std::size_t k = 1; k < n; ++k)
    for (std::size_t i = n - 1; i >= k; --i) {
      y[i] = (x[i - k] * y[i] - x[i] * y[i - 1]) / (x[i - k] - x[i]);
      if (i == k) break;
    }
  return y[n - 1];
}

}  // namespace

std::vector<cplx> sphere_trace(const SolutionBundle& u, double r) {
  if (u.empty()) return {};
  double lam = lambda_of(u), s = std::sqrt(lam);
  const auto& m = *u.front().u.mesh;
  std::size_t i = node_of(m, r);
  double rr = m.nodes[i];
  cplx ph = std::polar(1.0, -s * rr);
  std::vector<cplx> out;
  for (const auto& x : u) out.push_back(s * std::pow(rr, half_dim(x.mode.d)) * ph * x.u.values[i]);
  return out;
}

DrTrace dr_flux(const SolutionBundle& u, const SolutionBundle& v, const std::vector<double>& radii) {
  DrTrace t;
  t.radii = radii;
  if (u.empty()) {
    t.values.assign(radii.size(), 0.0);
    return t;
  }
  double s = std::sqrt(lambda_of(u));
  const auto& m = *u.front().u.mesh;
  for (double r : radii) {
    std::size_t i = node_of(m, r);
    double rr = m.nodes[i];
    cplx acc = 0.0;
    for (const auto& x : u) {
      const ModeSolution* y = nullptr;
      for (const auto& c : v)
        if (c.mode == x.mode) y = &c;
      if (!y) continue;
      cplx D = x.du.values[i] - cplx(0.0, s) * x.u.values[i] + 0.5 * (x.mode.d - 1) / rr * x.u.values[i];
      acc += D * std::conj(y->u.values[i]) * std::pow(rr, x.mode.d - 1);
    }
    t.values.push_back(acc);
  }
  // fit over radii within a decade of the largest
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < radii.size(); ++k)
    if (radii[k] >= 0.1 * radii.back() && std::abs(t.values[k]) > 0) {
      lx.push_back(std::log(radii[k]));
      ly.push_back(std::log(std::abs(t.values[k])));
    }
  t.decay_exponent = lx.size() > 1 ? slope(lx, ly) : 0.0;
  return t;
}

std::vector<double> dyadic_window(const RadialMesh& mesh, double support, int window) {
  std::vector<double> r;
  for (int j = -30; j <= 60; ++j) {
    double x = std::ldexp(1.0, j);
    if (x > support && x <= mesh.r_max() * (1 + 1e-12)) {
      std::size_t i = mesh.nearest(x);
      if (std::abs(mesh.nodes[i] - x) <= 1e-9 * x) r.push_back(mesh.nodes[i]);
    }
  }
  if ((int)r.size() > window) r.erase(r.begin(), r.end() - window);
  return r;
}

FarFieldResult cross_section(const SolutionBundle& u, const Bundle& f, const std::vector<double>& radii) {
  FarFieldResult res;
  res.radii = radii;
  if (u.empty()) return res;
  if (radii.size() < 2) throw Error("far-field window needs two radii");
  double lam = lambda_of(u);
  const auto& m = *u.front().u.mesh;
  // support of f
  double fmax = 0.0, supp = 0.0;
  for (const auto& g : f)
    for (auto v : g.values) fmax = std::max(fmax, std::abs(v));
  for (const auto& g : f)
    for (std::size_t i = 0; i < g.size(); ++i)
      if (std::abs(g.values[i]) > 1e-14 * fmax) supp = std::max(supp, m.nodes[i]);
  if (fmax > 0 && radii.front() <= supp) throw Error("far-field window overlaps supp f");
  for (const auto& x : u) res.modes.push_back(x.mode);
  for (double r : radii) res.coefficients.push_back(sphere_trace(u, r));
  std::vector<double> xs;
  for (double r : radii) xs.push_back(1.0 / r);
  for (std::size_t k = 0; k < u.size(); ++k) {
    std::vector<cplx> ys;
    for (const auto& c : res.coefficients) ys.push_back(c[k]);
    res.limit.push_back(extrapolate(xs, ys));
  }
  for (auto c : res.limit) res.mass += std::norm(c);
  // independent path: quadrature of Im f conj(u)
  double im = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    RadialField fp = f[k].to_plain();
    if (!(fp.mode == u[k].mode)) throw Error("solution and source modes differ");
    std::vector<double> e(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
      e[i] = std::imag(fp.values[i] * std::conj(u[k].u.values[i])) * std::pow(m.nodes[i], u[k].mode.d - 1);
    im += m.integrate(e);
  }
  res.mass_direct = std::sqrt(lam) * im;
  // rates
  std::vector<double> lr, ld, rr, la;
  for (std::size_t j = 0; j < radii.size(); ++j) {
    double tot = 0.0;
    for (auto c : res.coefficients[j]) tot += std::norm(c);
    if (tot > 0) {
      rr.push_back(radii[j]);
      la.push_back(0.5 * std::log(tot));
    }
    if (j + 1 < radii.size()) {
      double dif = 0.0;
      for (std::size_t k = 0; k < u.size(); ++k) dif += std::norm(res.coefficients[j + 1][k] - res.coefficients[j][k]);
      if (dif > 0) {
        lr.push_back(std::log(radii[j]));
        ld.push_back(0.5 * std::log(dif));
      }
    }
  }
  res.convergence_rate = lr.size() > 1 ? -slope(lr, ld) : 0.0;
  res.damping_rate = rr.size() > 1 ? -slope(rr, la) : 0.0;
  return res;
}

double cross_section_value(const FarFieldResult& r, const PotentialSpec& spec, double theta, double phi) {
  cplx s = 0.0;
  for (std::size_t k = 0; k < r.modes.size(); ++k) s += r.limit[k] * angular::value(spec, r.modes[k], theta, phi);
  return std::norm(s);
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (n < 2 || !(lo > 0) || !(hi > lo)) throw Error("bad log grid");
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo * std::pow(hi / lo, (double)i / (n - 1));
  return g;
}

SpectralResult spectral_reconstruction(const PotentialSpec& spec, const Source& f, const ProblemSpec& base,
                                       const std::vector<double>& lambdas, const MeshPtr& mesh,
                                       double coverage_threshold) {
  if (lambdas.size() < 2) throw Error("empty grid");
  for (std::size_t i = 1; i < lambdas.size(); ++i)
    if (!(lambdas[i] > lambdas[i - 1]) || !(lambdas[0] > 0)) throw Error("lambda grid must be positive and increasing");
  SpectralResult res;
  res.lambdas = lambdas;
  ProblemSpec p0 = base;
  p0.epsilon = 0.0;
  p0.sign = Sign::plus;
  auto g = decompose_rhs(f, spec, p0, mesh);
  res.actual = 0.0;
  for (const auto& x : g) {
    std::vector<double> e(mesh->size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = std::norm(x.values[i]);
    res.actual += mesh->integrate(e);
  }
  res.densities = parallel_map(lambdas.size(), [&](std::size_t j) {
    ProblemSpec p = p0;
    p.lambda = lambdas[j];
    double im = 0.0;
    for (const auto& x : g) {
      auto op = effective_index(spec, x.mode, p);
      auto sol = solve_mode_fd(op, x, p);
      RadialField w = sol.u.to_reduced();
      std::vector<double> e(mesh->size());
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = std::imag(x.values[i] * std::conj(w.values[i]));
      im += mesh->integrate(e);
    }
    return im / M_PI;
  });
  for (std::size_t j = 0; j + 1 < lambdas.size(); ++j) {
    double a = std::log(lambdas[j]), b = std::log(lambdas[j + 1]);
    res.reconstructed += 0.5 * (b - a) * (res.densities[j] * lambdas[j] + res.densities[j + 1] * lambdas[j + 1]);
  }
  res.coverage = res.actual > 0 ? res.reconstructed / res.actual : 1.0;
  // tail estimates: power law lambda^{d/2} below the grid, one e-fold above it
  double lo_tail = res.densities.front() * lambdas.front() / (0.5 * base.d);
  double hi_tail = res.densities.back() * lambdas.back();
  double tail_share = res.reconstructed > 0 ? (std::abs(lo_tail) + std::abs(hi_tail)) / res.reconstructed : 0.0;
  std::ostringstream n;
  if (res.actual > 0 && res.coverage < coverage_threshold) {
    res.warning = true;
    n << "coverage " << res.coverage << " below " << coverage_threshold;
  }
  if (tail_share > 1.0 - coverage_threshold) {
    res.warning = true;
    n << (n.str().empty() ? "" : "; ") << "estimated mass outside the grid " << tail_share;
  }
  res.notes = n.str();
  return res;
}

}  // namespace maghelm::farfield
