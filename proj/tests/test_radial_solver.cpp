#include <doctest.h>

#include <cmath>

#include "maghelm/norms.hpp"
#include "maghelm/radial_solver.hpp"

using namespace maghelm;

namespace {
ProblemSpec spec3(double lambda, double eps, double rmax = 32) {
  ProblemSpec p;
  p.d = 3;
  p.lambda = lambda;
  p.epsilon = eps;
  p.r_min = 1e-3;
  p.r_max = rmax;
  return p;
}

// outgoing solution of w'' + k^2 w = r 1_[1,2](r), w(0) = 0, in closed form
cplx exact_annulus(double r, cplx k) {
  const cplx I(0, 1);
  auto Ps = [&](double s) { return std::sin(k * s) / (k * k) - s * std::cos(k * s) / k; };  // int s sin(ks)
  auto Pe = [&](double s) { return std::exp(I * k * s) * (s / (I * k) + 1.0 / (k * k)); };  // int s e^{iks}
  double lo = std::min(std::max(r, 1.0), 2.0);
  cplx inner = Ps(std::min(r, 2.0) < 1.0 ? 1.0 : std::min(r, 2.0)) - Ps(1.0);
  cplx outer = Pe(2.0) - Pe(lo);
  return -(std::exp(I * k * r) * inner + std::sin(k * r) * outer) / k;
}

double rel_l2(const ModeSolution& s, const std::function<cplx(double)>& ref) {
  const auto& m = *s.u.mesh;
  std::vector<double> e(m.size()), n(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    cplx w = ref(m.nodes[i]) / m.nodes[i];
    e[i] = std::norm(s.u.values[i] - w) * m.nodes[i] * m.nodes[i];
    n[i] = std::norm(w) * m.nodes[i] * m.nodes[i];
  }
  return std::sqrt(m.integrate(e) / m.integrate(n));
}
}  // namespace

TEST_CASE("effective indices") {
  auto p = spec3(1, 0.1);
  auto f = build_example(PotentialKind::free, {}, 3);
  CHECK(effective_index(f, free_mode(3, 0), p).nu_eff == doctest::Approx(0.5));
  auto inv = build_example(PotentialKind::inverse_square, {{"nu1", 0.24}}, 3);
  auto op = effective_index(inv, free_mode(3, 0), p);
  CHECK(op.nu_eff == doctest::Approx(0.1));
  CHECK(op.mu_eff == doctest::Approx(0.01 - 0.25));
  auto p2 = p;
  p2.d = 2;
  auto ab = build_example(PotentialKind::aharonov_bohm, {{"alpha", 0.5}}, 2);
  ModeIndex m0;
  m0.d = 2;
  CHECK(effective_index(ab, m0, p2).nu_eff == doctest::Approx(0.5));
  auto bad = build_example(PotentialKind::inverse_square, {{"nu1", 0.3}}, 3);
  CHECK_THROWS_WITH_AS(effective_index(bad, free_mode(3, 0), p), "index below critical", Error);
}

TEST_CASE("decompose_rhs mode population") {
  auto f = build_example(PotentialKind::free, {}, 3);
  auto p = spec3(1, 0.1);
  p.mode_cutoff = 2;
  auto mesh = default_mesh(p, 1024);
  Source radial;
  CHECK(decompose_rhs(radial, f, p, mesh).size() == 1);
  Source y10;
  y10.harmonics = {{1, 0, 1.0}};
  auto g = decompose_rhs(y10, f, p, mesh);
  REQUIRE(g.size() == 1);
  CHECK(g[0].mode.index == 1);
  Source two;
  two.harmonics = {{0, 0, 1.0 / std::sqrt(2.0)}, {1, 0, 1.0 / std::sqrt(2.0)}};
  auto g2 = decompose_rhs(two, f, p, mesh);
  REQUIRE(g2.size() == 2);
  auto mass = [&](const RadialField& x) {
    std::vector<double> e(mesh->size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = std::norm(x.values[i]);
    return mesh->integrate(e);
  };
  CHECK(mass(g2[0]) == doctest::Approx(mass(g2[1])).epsilon(1e-10));
  p.mode_cutoff = 0;
  CHECK_THROWS_WITH_AS(decompose_rhs(y10, f, p, mesh), "mode index beyond mode_cutoff", Error);
}

TEST_CASE("fd solve against the closed-form outgoing solution") {
  auto f = build_example(PotentialKind::free, {}, 3);
  auto p = spec3(1, 0.0);
  auto mesh = default_mesh(p);
  auto g = decompose_rhs(Source{}, f, p, mesh);
  auto op = effective_index(f, g[0].mode, p);
  auto s = solve_mode_fd(op, g[0], p);
  // mode-0 projection carries the factor sqrt(4 pi) of Y_00
  double c = std::sqrt(4 * M_PI);
  CHECK(rel_l2(s, [&](double r) { return c * exact_annulus(r, 1.0); }) <= 1e-4);
}

TEST_CASE("zero source gives zero solution") {
  auto f = build_example(PotentialKind::free, {}, 3);
  auto p = spec3(1, 0.1);
  auto mesh = default_mesh(p, 1024);
  RadialField z(mesh, std::vector<cplx>(mesh->size(), 0.0), free_mode(3, 0), true);
  auto s = solve_mode_fd(effective_index(f, z.mode, p), z, p);
  for (auto v : s.u.values) CHECK(v == cplx(0.0));
}

TEST_CASE("fd and green agree with second-order convergence") {
  struct Case {
    PotentialSpec s;
    int d;
  };
  std::vector<Case> cases = {{build_example(PotentialKind::free, {}, 3), 3},
                             {build_example(PotentialKind::inverse_square, {{"nu1", 0.2}}, 3), 3},
                             {build_example(PotentialKind::aharonov_bohm, {{"alpha", 0.5}}, 2), 2}};
  for (const auto& c : cases) {
    auto p = spec3(1, 0.1);
    p.d = c.d;
    std::vector<double> gaps;
    for (int n : {1024, 2048, 4096}) {
      auto mesh = default_mesh(p, n);
      auto g = decompose_rhs(Source{}, c.s, p, mesh);
      auto op = effective_index(c.s, g[0].mode, p);
      auto a = solve_mode_fd(op, g[0], p), b = solve_mode_green(op, g[0], p);
      const auto& m = *mesh;
      std::vector<double> e(m.size()), nn(m.size());
      for (std::size_t i = 0; i < m.size(); ++i) {
        double w = std::pow(m.nodes[i], c.d - 1);
        e[i] = std::norm(a.u.values[i] - b.u.values[i]) * w;
        nn[i] = std::norm(b.u.values[i]) * w;
      }
      gaps.push_back(std::sqrt(m.integrate(e) / m.integrate(nn)));
    }
    CHECK(gaps.back() <= 1e-4);
    CHECK(gaps[0] / gaps[1] >= 3.0);
    CHECK(gaps[1] / gaps[2] >= 3.0);
  }
}

TEST_CASE("green solver rejects a residual potential") {
  auto c = build_example(PotentialKind::coulomb_type, {{"v_inf", -1.0}, {"alpha_exp", 1.0}}, 3);
  auto p = spec3(1, 0.1);
  auto mesh = default_mesh(p, 1024);
  auto g = decompose_rhs(Source{}, c, p, mesh);
  CHECK_THROWS_AS(solve_mode_green(effective_index(c, g[0].mode, p), g[0], p), Error);
}

TEST_CASE("green kernel from a point source: jump of w' equals the weight") {
  auto f = build_example(PotentialKind::free, {}, 3);
  auto p = spec3(1, 0.1);
  auto mesh = default_mesh(p, 2048);
  std::size_t i0 = mesh->nearest(3.0);
  std::vector<cplx> v(mesh->size(), 0.0);
  v[i0] = 1.0;
  RadialField g(mesh, v, free_mode(3, 0), true);
  auto s = solve_mode_green(effective_index(f, g.mode, p), g, p);
  auto w = s.u.to_reduced();
  // G(r, s0) = -sin(k r<) e^{i k r>} / k times the node weight
  cplx k = p.k();
  double s0 = mesh->nodes[i0], wt = mesh->weights[i0];
  for (double r : {1.0, 2.0, 5.0, 10.0}) {
    std::size_t i = mesh->nearest(r);
    double x = mesh->nodes[i];
    cplx G = -std::sin(k * std::min(x, s0)) * std::exp(cplx(0, 1) * k * std::max(x, s0)) / k;
    CHECK(std::abs(w.values[i] - wt * G) <= 1e-8 * std::abs(wt * G));
  }
}

TEST_CASE("outgoing sign convention") {
  auto f = build_example(PotentialKind::free, {}, 3);
  auto p = spec3(1, 0.0);
  auto mesh = default_mesh(p);
  auto u = resolve(f, Source{}, p, mesh);
  double r1 = 20, r2 = 20.5;
  auto a = u[0].u.values[mesh->nearest(r1)], b = u[0].u.values[mesh->nearest(r2)];
  double kloc = std::arg(b / a) / (mesh->nodes[mesh->nearest(r2)] - mesh->nodes[mesh->nearest(r1)]);
  CHECK(kloc == doctest::Approx(1.0).epsilon(0.02));
  p.sign = Sign::minus;
  auto v = resolve(f, Source{}, p, mesh);
  auto c = v[0].u.values[mesh->nearest(r1)], d = v[0].u.values[mesh->nearest(r2)];
  CHECK(std::arg(d / c) < 0);
}

TEST_CASE("a-priori bound from the imaginary part") {
  auto f = build_example(PotentialKind::inverse_square, {{"nu1", 0.2}}, 3);
  for (double eps : {0.5, 0.05}) {
    auto p = spec3(4, eps);
    auto mesh = default_mesh(p, 2048);
    auto g = decompose_rhs(Source{}, f, p, mesh);
    auto u = resolve(f, g, p);
    auto fp = g[0].to_plain();
    std::vector<double> uu(mesh->size()), fu(mesh->size());
    for (std::size_t i = 0; i < uu.size(); ++i) {
      double w = mesh->nodes[i] * mesh->nodes[i];
      uu[i] = std::norm(u[0].u.values[i]) * w;
      fu[i] = std::abs(fp.values[i]) * std::abs(u[0].u.values[i]) * w;
    }
    CHECK(eps * mesh->integrate(uu) <= mesh->integrate(fu) * (1 + 1e-8));
  }
}

TEST_CASE("resolve bundles and errors") {
  auto f = build_example(PotentialKind::inverse_square, {{"nu1", 0.2}}, 3);
  auto p = spec3(4, 1e-3);
  auto mesh = default_mesh(p, 2048);
  auto u = resolve(f, Source{}, p, mesh);
  CHECK(u.size() == 1);
  CHECK(std::isfinite(norms::weighted_l2(u, 0.0)));
  Source high;
  high.harmonics = {{3, 0, 1.0}};
  CHECK_THROWS_AS(resolve(f, high, p, mesh), Error);
}

TEST_CASE("limiting absorption") {
  auto f = build_example(PotentialKind::free, {}, 3);
  auto p = spec3(1, 0.0);
  auto mesh = default_mesh(p, 2048);
  std::vector<double> eps;
  for (int j = 1; j <= 8; ++j) eps.push_back(std::ldexp(1.0, -j));
  auto lap = limiting_absorption(f, Source{}, p, mesh, eps);
  CHECK(lap.monotone);
  CHECK(lap.limit_distances.back() < lap.limit_distances.front());
  CHECK(lap.extrapolated_distance <= 1e-3);
  auto rep = limiting_absorption(f, Source{}, p, mesh, {0.1, 0.1});
  CHECK(rep.distances[0] == doctest::Approx(0.0));
  CHECK_THROWS_WITH_AS(limiting_absorption(f, Source{}, p, mesh, {0.1, 0.2}), "non-monotone eps_sequence", Error);
  auto p0 = p;
  p0.lambda = 0;
  p0.epsilon = 0.1;
  CHECK_THROWS_AS(limiting_absorption(f, Source{}, p0, mesh, eps), Error);
}
