#include "maghelm/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "maghelm/linalg.hpp"
#include "maghelm/parallel.hpp"

namespace maghelm::evolution {

namespace {

// symmetric stiffness on interior nodes 1..N-2: K w = E B w
void stiffness(const EffectiveRadialOp& op, const RadialMesh& m, std::vector<double>& diag, std::vector<double>& off) {
  const std::size_t N = m.size();
  if (N < 4) throw Error("mesh too small for evolution");
  diag.assign(N - 2, 0.0);
  off.assign(N - 3, 0.0);
  for (std::size_t i = 1; i + 1 < N; ++i) {
    double r = m.nodes[i];
    diag[i - 1] = 1.0 / m.h(i - 1) + 1.0 / m.h(i) + m.weights[i] * (op.mu_eff / (r * r) - op.v_extra(r));
    if (i + 2 < N) off[i - 1] = -1.0 / m.h(i);
  }
}

}  // namespace

ModeEigensystem eigendecompose(const EffectiveRadialOp& op, const MeshPtr& mesh) {
  const auto& m = *mesh;
  const std::size_t N = m.size();
  std::vector<double> kd, ko;
  stiffness(op, m, kd, ko);
  std::vector<double> sb(N - 2);
  for (std::size_t i = 0; i < N - 2; ++i) sb[i] = std::sqrt(m.weights[i + 1]);
  std::vector<double> d(N - 2), e(N - 3);
  for (std::size_t i = 0; i < N - 2; ++i) d[i] = kd[i] / (sb[i] * sb[i]);
  for (std::size_t i = 0; i + 1 < N - 2; ++i) e[i] = ko[i] / (sb[i] * sb[i + 1]);
  auto te = linalg::symmetric_tridiagonal_eigen(d, e);
  ModeEigensystem s;
  s.mode = op.mode;
  s.mesh = mesh;
  s.eigenvalues = te.values;
  s.eigenvectors.reserve(te.vectors.size());
  for (const auto& y : te.vectors) {
    std::vector<double> v(N, 0.0);
    for (std::size_t i = 0; i < N - 2; ++i) v[i + 1] = y[i] / sb[i];
    s.eigenvectors.push_back(std::move(v));
  }
  return s;
}

double eigen_residual(const ModeEigensystem& eig, const EffectiveRadialOp& op) {
  const auto& m = *eig.mesh;
  const std::size_t N = m.size();
  std::vector<double> kd, ko;
  stiffness(op, m, kd, ko);
  double worst = 0.0;
  for (std::size_t n = 0; n < eig.eigenvalues.size(); ++n) {
    const auto& v = eig.eigenvectors[n];
    double res = 0.0, nv = 0.0;
    for (std::size_t i = 1; i + 1 < N; ++i) {
      double kv = kd[i - 1] * v[i];
      if (i > 1) kv += ko[i - 2] * v[i - 1];
      if (i + 2 < N) kv += ko[i - 1] * v[i + 1];
      double rr = kv - eig.eigenvalues[n] * m.weights[i] * v[i];
      res += rr * rr / m.weights[i];
      nv += m.weights[i] * v[i] * v[i];
    }
    double scale = std::max(1.0, std::abs(eig.eigenvalues[n]));
    worst = std::max(worst, std::sqrt(res / nv) / scale);
  }
  return worst;
}

double orthonormality_defect(const ModeEigensystem& eig) {
  const auto& m = *eig.mesh;
  const std::size_t K = eig.eigenvectors.size(), N = m.size();
  Eigen::MatrixXd V(N, K);
  for (std::size_t n = 0; n < K; ++n)
    for (std::size_t i = 0; i < N; ++i) V(i, n) = eig.eigenvectors[n][i] * std::sqrt(m.weights[i]);
  Eigen::MatrixXd G = V.transpose() * V - Eigen::MatrixXd::Identity(K, K);
  return G.cwiseAbs().maxCoeff();
}

RadialField propagate(const ModeEigensystem& eig, const RadialField& f, double t) {
  const auto& m = *eig.mesh;
  if (f.mesh->size() != m.size()) throw Error("field and eigensystem meshes differ");
  RadialField g = f.to_reduced();
  const std::size_t N = m.size();
  std::vector<cplx> out(N, 0.0);
  for (std::size_t n = 0; n < eig.eigenvalues.size(); ++n) {
    const auto& v = eig.eigenvectors[n];
    cplx c = 0.0;
    for (std::size_t i = 1; i + 1 < N; ++i) c += m.weights[i] * v[i] * g.values[i];
    c *= std::polar(1.0, -eig.eigenvalues[n] * t);
    for (std::size_t i = 1; i + 1 < N; ++i) out[i] += c * v[i];
  }
  return RadialField(eig.mesh, std::move(out), eig.mode, true);
}

double l2_norm(const RadialField& f) {
  RadialField g = f.to_reduced();
  const auto& m = *g.mesh;
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) s += m.weights[i] * std::norm(g.values[i]);
  return std::sqrt(s);
}

SmoothingCurve smoothing_curve(const PotentialSpec& spec, const std::function<double(double)>& w, const Source& f,
                               const ProblemSpec& problem, const MeshPtr& mesh, const SmoothingOptions& opt) {
  if (!w) throw Error("degenerate weight");
  const auto& m = *mesh;
  const std::size_t N = m.size();
  ProblemSpec p = problem;
  p.epsilon = 0.0;
  std::vector<double> rho(N);
  double wmax = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    double wi = w(m.nodes[i]);
    if (!std::isfinite(wi) || wi < 0) throw Error("weight must be finite and nonnegative");
    wmax = std::max(wmax, wi);
    rho[i] = std::sqrt(wi) / m.nodes[i];
  }
  if (wmax == 0.0) throw Error("degenerate weight");

  auto g = decompose_rhs(f, spec, p, mesh);
  SmoothingCurve cur;
  struct Block {
    std::vector<double> E;
    std::vector<cplx> c;
    Eigen::MatrixXd W;
  };
  std::vector<Block> blocks;
  double mass = 0.0, emean = 0.0, emax = 0.0, dropped_total = 0.0, fnorm2 = 0.0, supp = 0.0, gmax = 0.0;
  for (const auto& x : g)
    for (std::size_t i = 0; i < N; ++i) gmax = std::max(gmax, std::abs(x.values[i]));
  for (const auto& x : g) {
    for (std::size_t i = 0; i < N; ++i) {
      fnorm2 += m.weights[i] * std::norm(x.values[i]);
      if (std::abs(x.values[i]) > 1e-12 * gmax) supp = std::max(supp, m.nodes[i]);
    }
  }
  for (const auto& x : g) {
    auto op = effective_index(spec, x.mode, p);
    auto eig = eigendecompose(op, mesh);
    const std::size_t K = eig.eigenvalues.size();
    std::vector<cplx> c(K);
    for (std::size_t n = 0; n < K; ++n) {
      cplx s = 0.0;
      for (std::size_t i = 1; i + 1 < N; ++i) s += m.weights[i] * eig.eigenvectors[n][i] * x.values[i];
      c[n] = s;
    }
    // drop the smallest coefficients while their mass stays below tolerance
    std::vector<std::size_t> idx(K);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return std::norm(c[a]) < std::norm(c[b]); });
    double dropped = 0.0;
    std::vector<bool> keep(K, true);
    for (auto n : idx) {
      if (dropped + std::norm(c[n]) > opt.retain_tol * fnorm2) break;
      dropped += std::norm(c[n]);
      keep[n] = false;
    }
    dropped_total += dropped;
    Block b;
    std::vector<std::size_t> kept;
    for (std::size_t n = 0; n < K; ++n)
      if (keep[n]) kept.push_back(n);
    b.W.resize(kept.size(), kept.size());
    for (std::size_t a = 0; a < kept.size(); ++a) {
      b.E.push_back(eig.eigenvalues[kept[a]]);
      b.c.push_back(c[kept[a]]);
      mass += std::norm(c[kept[a]]);
      emean += eig.eigenvalues[kept[a]] * std::norm(c[kept[a]]);
      emax = std::max(emax, std::abs(eig.eigenvalues[kept[a]]));
    }
    Eigen::MatrixXd V(N, kept.size());
    for (std::size_t a = 0; a < kept.size(); ++a)
      for (std::size_t i = 0; i < N; ++i) V(i, a) = eig.eigenvectors[kept[a]][i];
    Eigen::VectorXd br(N);
    for (std::size_t i = 0; i < N; ++i) br[i] = m.weights[i] * rho[i];
    b.W = V.transpose() * br.asDiagonal() * V;
    cur.retained += (int)kept.size();
    blocks.push_back(std::move(b));
  }
  cur.lambda_bar = mass > 0 ? emean / mass : 0.0;
  cur.T_reflect = cur.lambda_bar > 0 ? (m.r_max() - supp) / std::sqrt(cur.lambda_bar) : 0.0;

  std::vector<double> hz = opt.horizons;
  if (hz.empty()) {
    if (cur.T_reflect > 0) {
      for (int k = 5; k >= 0; --k) hz.push_back(std::ldexp(cur.T_reflect, -k));
    } else {
      if (mass > 0) throw Error("no reflection-free window");
      hz.push_back(1.0);
    }
  }
  for (std::size_t i = 0; i < hz.size(); ++i)
    if (!(hz[i] > 0) || (i > 0 && !(hz[i] > hz[i - 1]))) throw Error("horizons must be positive and increasing");
  const double Tmax = hz.back();
  double dt0 = emax > 0 ? M_PI / (8.0 * emax) : Tmax;
  long steps = std::max<long>(1, (long)std::ceil(Tmax / dt0));
  const double dt = Tmax / steps;
  cur.dt = dt;

  auto density = [&](const std::vector<Eigen::VectorXcd>& cs) {
    double s = 0.0;
    for (std::size_t k = 0; k < blocks.size(); ++k) s += std::real(cs[k].dot(blocks[k].W * cs[k]));
    return s;
  };
  std::vector<double> dens(steps + 1);
  if (!opt.forcing_time) {
    cur.norm2 = fnorm2;
    dens = parallel_map((std::size_t)steps + 1, [&](std::size_t j) {
      double t = j * dt;
      std::vector<Eigen::VectorXcd> cs;
      for (const auto& b : blocks) {
        Eigen::VectorXcd v(b.E.size());
        for (std::size_t n = 0; n < b.E.size(); ++n) v[n] = std::polar(1.0, -b.E[n] * t) * b.c[n];
        cs.push_back(v);
      }
      return density(cs);
    });
  } else {
    // Duhamel: c_n(t) = -i c_n^F int_0^t e^{-i E_n (t-s)} g(s) ds, trapezoid recurrence
    std::vector<Eigen::VectorXcd> a;
    for (const auto& b : blocks) a.push_back(Eigen::VectorXcd::Zero(b.E.size()));
    double gprev = opt.forcing_time(0.0), g2 = 0.0;
    for (long j = 0; j <= steps; ++j) {
      if (j > 0) {
        double gt = opt.forcing_time(j * dt);
        for (std::size_t k = 0; k < blocks.size(); ++k)
          for (std::size_t n = 0; n < blocks[k].E.size(); ++n) {
            cplx ph = std::polar(1.0, -blocks[k].E[n] * dt);
            a[k][n] = ph * a[k][n] + 0.5 * dt * (ph * gprev + gt);
          }
        g2 += 0.5 * dt * (gprev * gprev + gt * gt);
        gprev = gt;
      }
      std::vector<Eigen::VectorXcd> cs;
      for (std::size_t k = 0; k < blocks.size(); ++k) {
        Eigen::VectorXcd v(blocks[k].E.size());
        for (std::size_t n = 0; n < blocks[k].E.size(); ++n) v[n] = cplx(0.0, -1.0) * blocks[k].c[n] * a[k][n];
        cs.push_back(v);
      }
      dens[j] = density(cs);
    }
    double fw = 0.0;
    for (const auto& x : g)
      for (std::size_t i = 0; i < N; ++i)
        if (rho[i] > 0) fw += m.weights[i] * std::norm(x.values[i]) / rho[i];
    cur.norm2 = fw * g2;
  }
  double acc = 0.0;
  std::size_t h = 0;
  for (long j = 0; j <= steps && h < hz.size(); ++j) {
    if (j > 0) acc += 0.5 * dt * (dens[j - 1] + dens[j]);
    while (h < hz.size() && std::abs(j * dt - hz[h]) <= 1e-9 * Tmax) {
      cur.T.push_back(hz[h]);
      cur.I.push_back(acc);
      ++h;
    }
    if (h < hz.size() && j * dt > hz[h] + 1e-9 * Tmax) {
      // horizon between grid points: linear share of the current step
      double frac = (hz[h] - (j - 1) * dt) / dt;
      cur.T.push_back(hz[h]);
      cur.I.push_back(acc - (1.0 - frac) * 0.5 * dt * (dens[j - 1] + dens[j]));
      ++h;
    }
  }
  // window: inside the crossing time and before the first kink, where the doubling increment grows
  cur.T_window = 0.0;
  for (std::size_t k = 0; k < cur.T.size(); ++k) {
    if (cur.T_reflect > 0 && cur.T[k] > cur.T_reflect * (1 + 1e-9)) break;
    if (k >= 2 && std::abs(cur.T[k] - 2 * cur.T[k - 1]) <= 1e-9 * cur.T[k] &&
        std::abs(cur.T[k - 1] - 2 * cur.T[k - 2]) <= 1e-9 * cur.T[k] &&
        cur.I[k] - cur.I[k - 1] > cur.I[k - 1] - cur.I[k - 2]) {
      cur.kink = true;
      break;
    }
    cur.T_window = cur.T[k];
  }
  // largest horizon in the window whose half is also a horizon
  cur.saturated = false;
  bool found = false;
  for (std::size_t k = cur.T.size(); k-- > 0 && !found;) {
    if (cur.T[k] > cur.T_window * (1 + 1e-9)) continue;
    for (std::size_t q = 0; q < k && !found; ++q)
      if (std::abs(cur.T[q] - 0.5 * cur.T[k]) <= 1e-9 * cur.T[k] && cur.I[q] > 0) {
        cur.saturation = (cur.I[k] - cur.I[q]) / cur.I[q];
        cur.saturated = cur.saturation <= 0.1;
        found = true;
      }
  }
  return cur;
}

EstimateReport smoothing_check(const PotentialSpec& spec, const std::function<double(double)>& w, const Source& f,
                               const ProblemSpec& problem, const MeshPtr& mesh, const SmoothingOptions& opt,
                               SmoothingCurve* curve) {
  auto c = smoothing_curve(spec, w, f, problem, mesh, opt);
  double I = 0.0, T = 0.0;
  for (std::size_t k = 0; k < c.T.size(); ++k)
    if (c.T[k] <= c.T_window * (1 + 1e-9)) {
      I = c.I[k];
      T = c.T[k];
    }
  auto rep = make_report(opt.forcing_time ? "smoothing_forced" : "smoothing", I, c.norm2, problem,
                         "int_0^T int |e^{itH} f|^2 w^{1/2}/|x|");
  rep.extras["T"] = T;
  rep.extras["T_reflect"] = c.T_reflect;
  rep.extras["T_window"] = c.T_window;
  rep.extras["kink"] = c.kink ? 1.0 : 0.0;
  rep.extras["saturation"] = c.saturation;
  rep.extras["saturated"] = c.saturated ? 1.0 : 0.0;
  rep.extras["lambda_bar"] = c.lambda_bar;
  rep.extras["dt"] = c.dt;
  rep.extras["retained"] = c.retained;
  if (curve) *curve = std::move(c);
  return rep;
}

}  // namespace maghelm::evolution
