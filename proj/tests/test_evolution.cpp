#include <doctest.h>

#include <cmath>
#include <random>

#include "maghelm/evolution.hpp"

using namespace maghelm;
using namespace maghelm::evolution;

namespace {
const auto free3 = build_example(PotentialKind::free, {}, 3);

ProblemSpec box(double r_max) {
  ProblemSpec p;
  p.d = 3;
  p.lambda = 1.0;
  p.epsilon = 0.0;
  p.r_max = r_max;
  return p;
}

Source gauss() {
  Source f;
  f.profile = Profile::gaussian;
  f.center = 4;
  f.width = 1;
  return f;
}

double inv_sq(double r) { return 1.0 / (r * r); }
}  // namespace

TEST_CASE("Dirichlet box spectrum") {
  auto p = box(20);
  auto mesh = make_mesh(RadialMesh::uniform(p.r_min, 20, 1024));
  auto op = effective_index(free3, free_mode(3, 0), p);
  auto e = eigendecompose(op, mesh);
  for (int n = 0; n < 10; ++n) {
    double k = (n + 1) * M_PI / (20 - p.r_min);
    CHECK(std::abs(e.eigenvalues[n] / (k * k) - 1) <= 5e-3);
  }
  CHECK(eigen_residual(e, op) < 1e-9);
  CHECK(orthonormality_defect(e) < 1e-10);
  CHECK(std::is_sorted(e.eigenvalues.begin(), e.eigenvalues.end()));
}

TEST_CASE("attractive inverse-square lowers the box levels") {
  auto p = box(20);
  auto mesh = make_mesh(RadialMesh::uniform(p.r_min, 20, 1024));
  auto e0 = eigendecompose(effective_index(free3, free_mode(3, 0), p), mesh);
  auto v = build_example(PotentialKind::inverse_square, {{"nu1", 0.2}}, 3);
  auto e1 = eigendecompose(effective_index(v, free_mode(3, 0), p), mesh);
  for (int n = 0; n < 5; ++n) CHECK(e1.eigenvalues[n] < e0.eigenvalues[n]);
}

TEST_CASE("propagation") {
  auto p = box(20);
  auto mesh = make_mesh(RadialMesh::uniform(p.r_min, 20, 1024));
  auto op = effective_index(free3, free_mode(3, 0), p);
  auto e = eigendecompose(op, mesh);
  auto g = decompose_rhs(gauss(), free3, p, mesh);
  REQUIRE(g.size() == 1);
  auto f = g[0].to_reduced();

  SUBCASE("t = 0 is the identity on interior nodes") {
    auto r = propagate(e, f, 0.0);
    CHECK(r.reduced);
    for (std::size_t i = 1; i + 1 < mesh->size(); ++i) CHECK(std::abs(r.values[i] - f.values[i]) < 1e-11);
  }
  SUBCASE("eigenvectors only pick up a phase") {
    for (int n : {0, 3, 17}) {
      std::vector<cplx> v(e.eigenvectors[n].begin(), e.eigenvectors[n].end());
      RadialField vf(mesh, v, e.mode, true);
      double t = 2.7;
      auto r = propagate(e, vf, t);
      cplx ph = std::polar(1.0, -e.eigenvalues[n] * t);
      for (std::size_t i = 0; i < mesh->size(); i += 13) CHECK(std::abs(r.values[i] - ph * v[i]) < 1e-10);
    }
  }
  SUBCASE("norm is conserved") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> T(0.0, 100.0);
    double n0 = l2_norm(propagate(e, f, 0.0));
    for (int k = 0; k < 10; ++k) CHECK(std::abs(l2_norm(propagate(e, f, T(rng))) / n0 - 1) <= 1e-9);
  }
  SUBCASE("mesh mismatch") {
    auto other = make_mesh(RadialMesh::uniform(p.r_min, 20, 512));
    RadialField x(other, std::vector<cplx>(512, 0.0), e.mode, true);
    CHECK_THROWS_WITH_AS(propagate(e, x, 1.0), "field and eigensystem meshes differ", Error);
  }
}

TEST_CASE("smoothing saturates inside the reflection-free window") {
  auto p = box(128);
  auto mesh = default_mesh(p, 2048);
  SmoothingCurve c;
  auto rep = smoothing_check(free3, inv_sq, gauss(), p, mesh, {}, &c);
  CHECK(c.saturated);
  CHECK(c.saturation <= 0.1);
  CHECK(c.T_window <= c.T_reflect);
  CHECK(std::is_sorted(c.I.begin(), c.I.end()));
  CHECK(std::isfinite(rep.ratio));
  CHECK(rep.ratio > 0);
  CHECK(rep.extras.at("T_window") == c.T_window);
}

TEST_CASE("smoothing of zero data") {
  auto p = box(128);
  auto mesh = default_mesh(p, 2048);
  Source z = gauss();
  z.amplitude = 0;
  CHECK(smoothing_check(free3, inv_sq, z, p, mesh).lhs == 0.0);
}

TEST_CASE("forced smoothing stays bounded") {
  auto p = box(128);
  auto mesh = default_mesh(p, 2048);
  SmoothingOptions o;
  o.forcing_time = [](double t) { return std::exp(-t); };
  o.horizons = {1, 2, 4, 8, 16};
  for (double c : {3.0, 4.0, 6.0}) {
    Source f = gauss();
    f.center = c;
    auto rep = smoothing_check(free3, inv_sq, f, p, mesh, o);
    CHECK(std::isfinite(rep.ratio));
    CHECK(rep.ratio < 1.0);
  }
}

TEST_CASE("smoothing errors") {
  auto p = box(128);
  auto mesh = default_mesh(p, 2048);
  CHECK_THROWS_WITH_AS(smoothing_check(free3, [](double) { return 0.0; }, gauss(), p, mesh), "degenerate weight",
                       Error);
  SmoothingOptions o;
  o.horizons = {4, 2};
  CHECK_THROWS_WITH_AS(smoothing_check(free3, inv_sq, gauss(), p, mesh, o), "horizons must be positive and increasing",
                       Error);
}
