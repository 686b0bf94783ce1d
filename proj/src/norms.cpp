#include "maghelm/norms.hpp"

#include <algorithm>
#include <cmath>

namespace maghelm::norms {

namespace {

// |u|^2 r^{d-1} at nodes, summed over modes; all fields must share one mesh
std::vector<double> density(const Bundle& u) {
  if (u.empty()) return {};
  const auto& m = *u.front().mesh;
  std::vector<double> s(m.size(), 0.0);
  for (const auto& f : u) {
    if (f.mesh->size() != m.size()) throw Error("bundle fields on different meshes");
    RadialField p = f.to_plain();
    for (std::size_t i = 0; i < m.size(); ++i) s[i] += std::norm(p.values[i]) * std::pow(m.nodes[i], f.mode.d - 1);
  }
  return s;
}

std::vector<double> gradient_density(const SolutionBundle& u, double lambda, bool shifted, Sign sign) {
  const auto& m = *u.front().u.mesh;
  std::vector<double> s(m.size(), 0.0);
  double k = shifted ? std::sqrt(lambda) : 0.0;
  cplx ph(0.0, sign == Sign::plus ? k : -k);
  for (const auto& x : u) {
    for (std::size_t i = 0; i < m.size(); ++i) {
      double r = m.nodes[i];
      cplx a = x.du.values[i] - ph * x.u.values[i];
      s[i] += (std::norm(a) + x.mode.tangential / (r * r) * std::norm(x.u.values[i])) * std::pow(r, x.mode.d - 1);
    }
  }
  return s;
}

}  // namespace

std::vector<double> cumulative(const RadialMesh& m, const std::vector<double>& f) {
  std::vector<double> c(m.size(), 0.0);
  for (std::size_t i = 1; i < m.size(); ++i) c[i] = c[i - 1] + 0.5 * m.h(i - 1) * (f[i - 1] + f[i]);
  return c;
}

double integral_upto(const RadialMesh& m, const std::vector<double>& c, const std::vector<double>& f, double R) {
  if (R <= m.r_min()) return 0.0;
  if (R >= m.r_max()) return c.back();
  auto it = std::upper_bound(m.nodes.begin(), m.nodes.end(), R);
  std::size_t i = (it - m.nodes.begin()) - 1;
  double t = (R - m.nodes[i]) / m.h(i);
  double fR = f[i] + t * (f[i + 1] - f[i]);
  return c[i] + 0.5 * t * m.h(i) * (f[i] + fR);
}

Bundle fields(const SolutionBundle& u) {
  Bundle b;
  for (const auto& s : u) b.push_back(s.u);
  return b;
}

double weighted_l2(const Bundle& u, double s) {
  if (u.empty()) return 0.0;
  const auto& m = *u.front().mesh;
  auto dens = density(u);
  for (std::size_t i = 0; i < m.size(); ++i) dens[i] *= std::pow(m.nodes[i], s);
  return m.integrate(dens);
}

double weighted_l2(const SolutionBundle& u, double s) { return weighted_l2(fields(u), s); }

double ah_norm(const Bundle& u, double R0) {
  if (u.empty()) return 0.0;
  const auto& m = *u.front().mesh;
  if (R0 >= m.r_max()) throw Error("R0 beyond truncation");
  auto c = cumulative(m, density(u));
  double best = 0.0;
  if (R0 > m.r_min()) best = c.empty() ? 0.0 : integral_upto(m, c, density(u), R0) / R0;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m.nodes[i] >= R0) best = std::max(best, c[i] / m.nodes[i]);
  return std::sqrt(best);
}

NormReport ah_dual_report(const Bundle& f, double R0) {
  NormReport rep;
  rep.name = "ah_dual";
  rep.params["R0"] = R0;
  if (f.empty()) return rep;
  const auto& m = *f.front().mesh;
  auto dens = density(f);
  auto c = cumulative(m, dens);
  auto F = [&](double R) { return integral_upto(m, c, dens, R); };
  double total = 0.0;
  if (R0 > 0) total += std::sqrt(R0 * F(R0));
  // shells [2^j, 2^{j+1}] clipped below at R0; the first one starts at or below R0
  double start = std::max(R0, m.r_min());
  int j = (int)std::floor(std::log2(start));
  for (; std::ldexp(1.0, j) < m.r_max(); ++j) {
    double lo = std::max(std::ldexp(1.0, j), start), hi = std::ldexp(1.0, j + 1);
    if (hi <= lo) continue;
    double mass = F(std::min(hi, m.r_max())) - F(lo);
    total += std::sqrt(std::ldexp(1.0, j + 1) * std::max(mass, 0.0));
  }
  rep.value = total;
  rep.params["tail_mass_at_rmax"] = dens.back();
  return rep;
}

double ah_dual(const Bundle& f, double R0) { return ah_dual_report(f, R0).value; }

double ah_norm_gradient(const SolutionBundle& u, double R0) {
  if (u.empty()) return 0.0;
  const auto& m = *u.front().u.mesh;
  auto g = gradient_density(u, 0.0, false, Sign::plus);
  auto c = cumulative(m, g);
  double best = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m.nodes[i] >= R0) best = std::max(best, c[i] / m.nodes[i]);
  return std::sqrt(best);
}

GradientSplit gradient_split(const SolutionBundle& u, const PotentialSpec&) {
  GradientSplit s;
  for (const auto& x : u) {
    const auto& m = *x.u.mesh;
    std::vector<double> a(m.size()), b(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
      double r = m.nodes[i], wt = std::pow(r, x.mode.d - 1);
      a[i] = std::norm(x.du.values[i]) * wt;
      b[i] = x.mode.tangential / (r * r) * std::norm(x.u.values[i]) * wt;
    }
    s.radial += m.integrate(a);
    s.tangential += m.integrate(b);
  }
  return s;
}

double dirichlet_form_reduced(const SolutionBundle& u) {
  double s = 0.0;
  for (const auto& x : u) {
    const auto& m = *x.u.mesh;
    double c = half_dim(x.mode.d);
    std::vector<double> e(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
      double r = m.nodes[i], rc = std::pow(r, c);
      cplx w = rc * x.u.values[i];
      cplx dw = rc * (x.du.values[i] + c * x.u.values[i] / r);
      e[i] = std::norm(dw) - 2.0 * c * std::real(dw * std::conj(w)) / r + (c * c + x.mode.tangential) * std::norm(w) / (r * r);
    }
    s += m.integrate(e);
  }
  return s;
}

double phase_shifted_gradient(const SolutionBundle& u, double lambda, Sign sign) {
  if (!(lambda > 0)) throw Error("phase shift needs lambda > 0");
  if (u.empty()) return 0.0;
  return u.front().u.mesh->integrate(gradient_density(u, lambda, true, sign));
}

std::vector<double> gradient_tail(const SolutionBundle& u, double lambda, bool shifted, Sign sign) {
  if (u.empty()) return {};
  if (shifted && !(lambda > 0)) throw Error("phase shift needs lambda > 0");
  const auto& m = *u.front().u.mesh;
  auto g = gradient_density(u, lambda, shifted, sign);
  auto c = cumulative(m, g);
  std::vector<double> t(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) t[i] = c.back() - c[i];
  return t;
}

double tangential_over_r(const SolutionBundle& u) {
  double s = 0.0;
  for (const auto& x : u) {
    const auto& m = *x.u.mesh;
    std::vector<double> e(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
      double r = m.nodes[i];
      e[i] = x.mode.tangential / (r * r * r) * std::norm(x.u.values[i]) * std::pow(r, x.mode.d - 1);
    }
    s += m.integrate(e);
  }
  return s;
}

double morrey_campanato_norm(const std::function<double(const Point&)>& weight, int d, double alpha, double p,
                             const std::vector<double>& radii, const ProbeGrid& grid) {
  if (p < 1.0) throw Error("Morrey-Campanato exponent p must be >= 1");
  if ((int)grid.lo.size() != d || (int)grid.hi.size() != d || (int)grid.n.size() != d) throw Error("probe grid dimension");
  double cell = 1.0;
  std::size_t total = 1;
  for (int j = 0; j < d; ++j) {
    cell *= (grid.hi[j] - grid.lo[j]) / grid.n[j];
    total *= (std::size_t)grid.n[j];
  }
  std::vector<std::pair<double, double>> samples;
  samples.reserve(total);
  std::vector<int> idx(d, 0);
  Point x(d);
  for (std::size_t q = 0; q < total; ++q) {
    double r2 = 0.0;
    for (int j = 0; j < d; ++j) {
      x[j] = grid.lo[j] + (idx[j] + 0.5) * (grid.hi[j] - grid.lo[j]) / grid.n[j];
      r2 += x[j] * x[j];
    }
    double w = std::abs(weight(x));
    if (w > 0) samples.emplace_back(std::sqrt(r2), std::pow(w, p) * cell);
    for (int j = 0; j < d; ++j) {
      if (++idx[j] < grid.n[j]) break;
      idx[j] = 0;
    }
  }
  std::sort(samples.begin(), samples.end());
  std::vector<double> pre(samples.size() + 1, 0.0);
  for (std::size_t i = 0; i < samples.size(); ++i) pre[i + 1] = pre[i] + samples[i].second;
  double best = 0.0;
  for (double r : radii) {
    auto it = std::lower_bound(samples.begin(), samples.end(), std::make_pair(r, -HUGE_VAL));
    double mass = pre[it - samples.begin()];
    best = std::max(best, std::pow(mass / std::pow(r, d - p * alpha), 1.0 / p));
  }
  return best;
}

double morrey_campanato_radial(const std::function<double(double)>& weight, int d, double alpha, double p,
                               const std::vector<double>& radii, int n_quad) {
  if (p < 1.0) throw Error("Morrey-Campanato exponent p must be >= 1");
  double area = d == 2 ? 2.0 * M_PI : d == 3 ? 4.0 * M_PI : 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
  double best = 0.0;
  for (double r : radii) {
    // int_0^r |w|^p s^{d-1} ds in log variable down to r * 1e-12
    double L = std::log(1e12), s = 0.0;
    for (int i = 0; i < n_quad; ++i) {
      double t = -L + (i + 0.5) * L / n_quad, rr = r * std::exp(t);
      s += std::pow(std::abs(weight(rr)), p) * std::pow(rr, d) * L / n_quad;
    }
    best = std::max(best, std::pow(area * s / std::pow(r, d - p * alpha), 1.0 / p));
  }
  return best;
}

SlabScan slab_weight_scan(int d, int k, double p, double q, const std::vector<double>& Rs, int cells_per_unit) {
  if (k < 1 || k > d) throw Error("slab needs 1 <= k <= d");
  if (Rs.size() < 2) throw Error("empty grid");
  SlabScan s;
  s.R = Rs;
  std::vector<double> lr, lg;
  for (double R : Rs) {
    const double amp = std::pow(R, -d * (1.0 - 1.0 / p));
    ProbeGrid g;
    for (int j = 0; j < d; ++j) {
      bool wide = j >= d - k;
      g.lo.push_back(wide ? R : 0.0);
      g.hi.push_back(wide ? 2 * R : 1.0);
      g.n.push_back(wide ? 6 * cells_per_unit : cells_per_unit);
    }
    double rfar = std::sqrt((d - k) + 4.0 * k * R * R);
    std::vector<double> radii;
    for (int i = 0; i <= 64; ++i) radii.push_back(R * std::pow(1.01 * rfar / R, i / 64.0));
    auto omega = [&](const Point&) { return amp; };
    auto gw = [&](const Point& x) {
      double r2 = 0;
      for (double v : x) r2 += v * v;
      return std::sqrt(amp / r2);
    };
    s.omega_norm.push_back(morrey_campanato_norm(omega, d, 2.0, p, radii, g));
    s.gradient_weight_norm.push_back(morrey_campanato_norm(gw, d, 2.0, q, radii, g));
    lr.push_back(std::log(R));
    lg.push_back(std::log(s.gradient_weight_norm.back()));
  }
  double n = lr.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lr.size(); ++i) {
    sx += lr[i]; sy += lg[i]; sxx += lr[i] * lr[i]; sxy += lr[i] * lg[i];
  }
  s.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  s.exact_exponent = 1.0 - (d - k) / q - 0.5 * d * (1.0 - 1.0 / p);
  s.stated_exponent = 1.0 - 2.0 / q - d * (1.0 - 1.0 / p);
  auto [lo, hi] = std::minmax_element(s.omega_norm.begin(), s.omega_norm.end());
  s.omega_spread = *hi / *lo - 1.0;
  return s;
}

}  // namespace maghelm::norms
