#include <doctest.h>

#include <cmath>

#include "maghelm/farfield.hpp"

using namespace maghelm;
using namespace maghelm::farfield;

namespace {
const auto free3 = build_example(PotentialKind::free, {}, 3);

struct Case {
  ProblemSpec p;
  MeshPtr mesh;
  Bundle g;
  SolutionBundle u;
};

Case make(double eps, Source f = {}, int cutoff = 0, Sign sign = Sign::plus) {
  Case c;
  c.p.d = 3;
  c.p.lambda = 1.0;
  c.p.epsilon = eps;
  c.p.r_max = 64;
  c.p.mode_cutoff = cutoff;
  c.p.sign = sign;
  c.mesh = default_mesh(c.p, 4096);
  c.g = decompose_rhs(f, free3, c.p, c.mesh);
  c.u = resolve(free3, c.g, c.p);
  return c;
}
}  // namespace

TEST_CASE("dyadic window lands on nodes beyond the support") {
  auto c = make(0.0);
  auto r = dyadic_window(*c.mesh, 2.0, 5);
  REQUIRE(r.size() == 5);
  CHECK(r.front() == 4.0);
  CHECK(r.back() == 64.0);
  for (double x : r) CHECK(c.mesh->nodes[c.mesh->nearest(x)] == doctest::Approx(x).epsilon(1e-12));
  CHECK(dyadic_window(*c.mesh, 2.0, 3).front() == 16.0);
}

TEST_CASE("far-field coefficient of an outgoing wave is flat in r") {
  auto c = make(0.0);
  auto rad = dyadic_window(*c.mesh, 2.0, 4);
  auto res = cross_section(c.u, c.g, rad);
  double lo = HUGE_VAL, hi = 0;
  for (const auto& row : res.coefficients) {
    lo = std::min(lo, std::abs(row[0]));
    hi = std::max(hi, std::abs(row[0]));
  }
  CHECK(hi / lo - 1 <= 1e-3);
  CHECK(std::abs(res.damping_rate) < 1e-4);
}

TEST_CASE("sphere trace matches the coefficient table") {
  auto c = make(0.0);
  auto tr = sphere_trace(c.u, 16.0);
  auto res = cross_section(c.u, c.g, {16.0, 32.0});
  REQUIRE(tr.size() == 1);
  CHECK(std::abs(tr[0] - res.coefficients[0][0]) < 1e-12);
  CHECK_THROWS_WITH_AS(sphere_trace(c.u, 16.01), "radius not on the mesh", Error);
}

TEST_CASE("damped far field decays at Im k") {
  auto c = make(0.1);
  auto res = cross_section(c.u, c.g, dyadic_window(*c.mesh, 2.0, 5));
  CHECK(std::abs(res.damping_rate / c.p.k().imag() - 1) <= 0.05);
}

TEST_CASE("one-mode cross-section is isotropic and carries the mass") {
  auto c = make(0.0);
  auto res = cross_section(c.u, c.g, dyadic_window(*c.mesh, 2.0, 5));
  CHECK(std::abs(res.mass / res.mass_direct - 1) <= 1e-3);
  double a = cross_section_value(res, free3, 0.3, 0.1), b = cross_section_value(res, free3, 2.0, 1.0);
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
  // mass equals G times the sphere area
  CHECK(res.mass == doctest::Approx(4 * M_PI * a).epsilon(1e-9));
}

TEST_CASE("two-mode cross-section") {
  Source f;
  f.harmonics = {{0, 0, 1.0}, {1, 0, 0.5}};
  auto c = make(0.0, f, 1);
  REQUIRE(c.u.size() == 2);
  auto res = cross_section(c.u, c.g, dyadic_window(*c.mesh, 2.0, 5));
  CHECK(std::abs(res.mass / res.mass_direct - 1) <= 1e-3);
  double g0 = cross_section_value(res, free3, 0.0, 0.0), g1 = cross_section_value(res, free3, M_PI / 2, 0.0);
  CHECK(std::abs(g0 - g1) > 1e-3 * g0);
}

TEST_CASE("zero source gives a zero measure") {
  Source f;
  f.amplitude = 0.0;
  auto c = make(0.0, f);
  if (!c.u.empty()) {
    auto res = cross_section(c.u, c.g, dyadic_window(*c.mesh, 2.0, 5));
    CHECK(res.mass == 0.0);
    CHECK(res.mass_direct == 0.0);
  }
}

TEST_CASE("window errors") {
  auto c = make(0.0);
  CHECK_THROWS_WITH_AS(cross_section(c.u, c.g, {1.5, 2.0, 4.0}), "far-field window overlaps supp f", Error);
  CHECK_THROWS_WITH_AS(cross_section(c.u, c.g, {8.0}), "far-field window needs two radii", Error);
}

TEST_CASE("radial flux decays for outgoing and not for incoming") {
  auto out = make(0.0);
  auto rad = dyadic_window(*out.mesh, 2.0, 4);
  auto a = dr_flux(out.u, out.u, rad);
  REQUIRE(a.values.size() == rad.size());
  CHECK(a.decay_exponent < 0);
  auto in = make(0.0, {}, 0, Sign::minus);
  auto b = dr_flux(in.u, in.u, rad);
  double amin = HUGE_VAL;
  for (auto v : b.values) amin = std::min(amin, std::abs(v));
  for (auto v : a.values) CHECK(std::abs(v) < 1e-2 * amin);
  CHECK(std::abs(b.decay_exponent) < 0.2);
}

TEST_CASE("spectral reconstruction of a bump") {
  ProblemSpec p;
  p.d = 3;
  p.lambda = 1.0;
  p.r_max = 4;
  auto mesh = default_mesh(p, 2048);
  Source b;
  b.profile = Profile::bump;
  auto full = spectral_reconstruction(free3, b, p, log_grid(1e-2, 400, 64), mesh);
  CHECK(std::abs(full.coverage - 1) <= 0.01);
  CHECK_FALSE(full.warning);
  auto cut = spectral_reconstruction(free3, b, p, log_grid(10, 400, 64), mesh);
  CHECK(cut.reconstructed < cut.actual);
  CHECK(cut.warning);
  CHECK(cut.notes.find("coverage") != std::string::npos);
  Source z = b;
  z.amplitude = 0;
  auto zero = spectral_reconstruction(free3, z, p, log_grid(1e-2, 400, 16), mesh);
  CHECK(zero.reconstructed == 0.0);
  CHECK_THROWS_WITH_AS(log_grid(1, 0.5, 8), "bad log grid", Error);
  CHECK_THROWS_WITH_AS(spectral_reconstruction(free3, b, p, {2.0, 1.0}, mesh),
                       "lambda grid must be positive and increasing", Error);
}

TEST_CASE("log grid endpoints") {
  auto g = log_grid(1e-2, 400, 64);
  REQUIRE(g.size() == 64);
  CHECK(g.front() == doctest::Approx(1e-2));
  CHECK(g.back() == doctest::Approx(400));
  CHECK(g[1] / g[0] == doctest::Approx(g[63] / g[62]));
}
