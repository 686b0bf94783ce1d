#include <doctest.h>

#include <cmath>

#include "maghelm/identities.hpp"
#include "maghelm/radial_solver.hpp"

using namespace maghelm;
using namespace maghelm::identities;

namespace {
ProblemSpec free3(double lambda = 1.0, double eps = 0.1) {
  ProblemSpec p;
  p.d = 3;
  p.lambda = lambda;
  p.epsilon = eps;
  p.r_max = 16;
  return p;
}

struct Solved {
  MeshPtr mesh;
  Bundle g;
  SolutionBundle u;
};

Solved solve(const PotentialSpec& v, const ProblemSpec& p, int nodes, Source f = {}) {
  Solved s;
  s.mesh = default_mesh(p, nodes);
  s.g = decompose_rhs(f, v, p, s.mesh);
  s.u = resolve(v, s.g, p);
  return s;
}
}  // namespace

TEST_CASE("multiplier samples") {
  auto mesh = RadialMesh::graded(1e-3, 16.0, 1024);
  auto q = multiplier_eval({MultiplierKind::quadratic}, mesh);
  auto c = multiplier_eval({MultiplierKind::cubic}, mesh);
  MultiplierSpec pw{MultiplierKind::piecewise, 8.0};
  auto p = multiplier_eval(pw, mesh);
  for (std::size_t i = 0; i < mesh.size(); i += 37) {
    double r = mesh.nodes[i];
    CHECK(q.psi1[i] == doctest::Approx(r));
    CHECK(q.psi2[i] == 1.0);
    CHECK(c.psi1[i] == doctest::Approx(r * r));
    CHECK(c.psi2[i] == doctest::Approx(2 * r));
    if (r < 8.0) {
      CHECK(p.psi2[i] == doctest::Approx(2 * r));
    } else if (r > 8.0) {
      CHECK(p.psi1[i] == doctest::Approx(8 * r));
      CHECK(p.psi2[i] == 8.0);
    }
    CHECK(q.d_psi1_over_r[i] == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("custom multiplier by differences") {
  auto mesh = RadialMesh::graded(1e-3, 8.0, 512);
  MultiplierSpec m;
  m.kind = MultiplierKind::custom;
  m.custom_dpsi = [](double r) { return r / (1 + r); };
  auto s = multiplier_eval(m, mesh);
  for (std::size_t i = 0; i < mesh.size(); i += 41) {
    double r = mesh.nodes[i];
    CHECK(s.psi2[i] == doctest::Approx(1 / ((1 + r) * (1 + r))).epsilon(1e-6));
  }
}

TEST_CASE("multiplier errors") {
  auto mesh = RadialMesh::graded(1e-3, 16.0, 1024);
  CHECK_THROWS_WITH_AS(multiplier_from_string("quartic"), "unknown multiplier 'quartic'", Error);
  MultiplierSpec bad{MultiplierKind::piecewise, -1.0};
  CHECK_THROWS_WITH_AS(multiplier_eval(bad, mesh), "piecewise multiplier needs R1 > 0", Error);
  MultiplierSpec off{MultiplierKind::piecewise, 8.3};
  CHECK_THROWS_WITH_AS(multiplier_eval(off, mesh), "multiplier kink not on a mesh node", Error);
  MultiplierSpec none;
  none.kind = MultiplierKind::custom;
  CHECK_THROWS_WITH_AS(multiplier_eval(none, mesh), "custom multiplier needs psi'", Error);
  MultiplierSpec steep;
  steep.kind = MultiplierKind::custom;
  steep.custom_dpsi = [](double r) { return 2 * r; };
  CHECK_THROWS_WITH_AS(multiplier_eval(steep, mesh), "multiplier violates |psi'| <= r for r <= 1", Error);
  MultiplierSpec jump;
  jump.kind = MultiplierKind::custom;
  jump.custom_dpsi = [](double r) { return r < 4.0 ? r : 8.0; };
  auto m2 = RadialMesh::uniform(0.5, 8.0, 31);  // 4.0 is a node
  CHECK_THROWS_WITH_AS(multiplier_eval(jump, m2), "custom psi' is not continuous", Error);
  for (auto k : {MultiplierKind::quadratic, MultiplierKind::cubic, MultiplierKind::piecewise, MultiplierKind::custom})
    CHECK(multiplier_from_string(to_string(k)) == k);
}

TEST_CASE("key identity closes on the free operator") {
  auto v = build_example(PotentialKind::free, {}, 3);
  auto p = free3();
  std::vector<double> rel;
  for (int n : {1024, 2048, 4096}) {
    auto s = solve(v, p, n);
    auto r = morawetz_residual(s.u, s.g, {MultiplierKind::quadratic}, v, p);
    CHECK(std::isfinite(r.lhs));
    CHECK(r.scale > 0);
    rel.push_back(r.relative);
  }
  CHECK(rel.back() <= 1e-5);
  CHECK(rel[0] / rel[1] >= 3.0);
  CHECK(rel[1] / rel[2] >= 3.0);
}

TEST_CASE("cubic and piecewise multipliers close") {
  auto v = build_example(PotentialKind::free, {}, 3);
  auto p = free3();
  auto s = solve(v, p, 4096);
  CHECK(morawetz_residual(s.u, s.g, {MultiplierKind::cubic}, v, p).relative <= 1e-5);
  CHECK(morawetz_residual(s.u, s.g, {MultiplierKind::piecewise, 8.0}, v, p).relative <= 1e-5);
}

TEST_CASE("key identity with an inverse-square potential") {
  auto v = build_example(PotentialKind::inverse_square, {{"nu1", 0.2}}, 3);
  auto p = free3(2.0, 0.2);
  auto s = solve(v, p, 4096);
  CHECK(morawetz_residual(s.u, s.g, {MultiplierKind::quadratic}, v, p).relative <= 1e-4);
}

TEST_CASE("alpha=1 identity") {
  auto v = build_example(PotentialKind::free, {}, 3);
  auto p = free3(4.0, 0.25);
  auto s = solve(v, p, 4096);
  CHECK(alpha1_residual(s.u, s.g, v, p).relative <= 1e-5);
  auto inv = build_example(PotentialKind::inverse_square, {{"nu1", 0.2}}, 3);
  CHECK_THROWS_WITH_AS(alpha1_residual(s.u, s.g, inv, p), "cubic-multiplier identity is for the free operator", Error);
  auto p0 = p;
  p0.lambda = 0.0;
  CHECK_THROWS_WITH_AS(alpha1_residual(s.u, s.g, v, p0), "multiplier identity needs lambda > 0", Error);
}

TEST_CASE("energy identities") {
  auto v = build_example(PotentialKind::free, {}, 3);
  auto p = free3();
  auto s = solve(v, p, 4096);
  auto [re, im] = symmetric_antisymmetric_residuals(s.u, s.g, constant_test_function(), v, p);
  CHECK(re.relative <= 1e-5);
  CHECK(im.relative <= 1e-5);
  TestFunction broken;
  CHECK_THROWS_WITH_AS(symmetric_antisymmetric_residuals(s.u, s.g, broken, v, p), "test function incomplete", Error);
}

TEST_CASE("zero source gives zero residual") {
  auto v = build_example(PotentialKind::free, {}, 3);
  auto p = free3();
  Source f;
  f.amplitude = 0.0;
  auto s = solve(v, p, 1024, f);
  for (const auto& x : s.u)
    for (auto c : x.u.values) CHECK(c == cplx(0.0));
  if (!s.u.empty()) {
    auto r = morawetz_residual(s.u, s.g, {MultiplierKind::quadratic}, v, p);
    CHECK(r.residual == 0.0);
  }
}

TEST_CASE("identity sides scale quadratically in the source") {
  auto v = build_example(PotentialKind::free, {}, 3);
  auto p = free3();
  Source f2;
  f2.amplitude = 2.0;
  auto a = solve(v, p, 1024), b = solve(v, p, 1024, f2);
  auto ra = morawetz_residual(a.u, a.g, {MultiplierKind::quadratic}, v, p);
  auto rb = morawetz_residual(b.u, b.g, {MultiplierKind::quadratic}, v, p);
  CHECK(rb.lhs == doctest::Approx(4 * ra.lhs).epsilon(1e-10));
  CHECK(rb.rhs == doctest::Approx(4 * ra.rhs).epsilon(1e-10));
  CHECK(rb.relative == doctest::Approx(ra.relative).epsilon(1e-8));
}

TEST_CASE("mismatched bundles") {
  auto v = build_example(PotentialKind::free, {}, 3);
  auto p = free3();
  auto s = solve(v, p, 1024);
  Bundle empty;
  CHECK_THROWS_WITH_AS(morawetz_residual(s.u, empty, {MultiplierKind::quadratic}, v, p),
                       "solution and source bundles differ in size", Error);
  auto p0 = p;
  p0.lambda = -1.0;
  CHECK_THROWS_WITH_AS(morawetz_residual(s.u, s.g, {MultiplierKind::quadratic}, v, p0),
                       "multiplier identity needs lambda > 0", Error);
}
