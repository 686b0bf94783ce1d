// One PASS/FAIL line per acceptance criterion; always exits 0.
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "maghelm/estimates.hpp"
#include "maghelm/evolution.hpp"
#include "maghelm/farfield.hpp"
#include "maghelm/identities.hpp"
#include "maghelm/norms.hpp"
#include "maghelm/radial_solver.hpp"

using namespace maghelm;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char b[64];
  std::snprintf(b, sizeof b, f, a);
  return b;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const auto free3 = build_example(PotentialKind::free, {}, 3);

ProblemSpec spec(int d, double lambda, double eps, double r_max) {
  ProblemSpec p;
  p.d = d;
  p.lambda = lambda;
  p.epsilon = eps;
  p.r_max = r_max;
  return p;
}

// closure at 1024/2048/4096 nodes for one identity
Verdict identity_closure(const std::function<identities::IdentityResidual(const SolutionBundle&, const Bundle&,
                                                                           const ProblemSpec&)>& eval) {
  auto p = spec(3, 1.0, 0.1, 16);
  std::vector<double> rel;
  double slowest = 0.0;
  for (int n : {1024, 2048, 4096}) {
    auto t0 = std::chrono::steady_clock::now();
    auto mesh = default_mesh(p, n);
    auto g = decompose_rhs(Source{}, free3, p, mesh);
    auto u = resolve(free3, g, p);
    rel.push_back(eval(u, g, p).relative);
    slowest = std::max(slowest, seconds_since(t0));
  }
  double r1 = rel[0] / rel[1], r2 = rel[1] / rel[2];
  Verdict v;
  v.pass = rel[2] <= 1e-5 && r1 >= 3 && r2 >= 3 && slowest <= 5.0;
  v.detail = "residual " + fmt("%.3g", rel[2]) + " at 4096 nodes, reductions " + fmt("%.2f", r1) + ", " +
             fmt("%.2f", r2) + ", slowest case " + fmt("%.2fs", slowest);
  return v;
}

Verdict c1() {
  return identity_closure([](const SolutionBundle& u, const Bundle& g, const ProblemSpec& p) {
    return identities::morawetz_residual(u, g, {identities::MultiplierKind::quadratic}, free3, p);
  });
}

Verdict c2() {
  return identity_closure([](const SolutionBundle& u, const Bundle& g, const ProblemSpec& p) {
    return identities::alpha1_residual(u, g, free3, p);
  });
}

Verdict c3() {
  auto hm = hardy_mesh();
  double c = estimates::hardy_constant(free3, 3, hm, 0);
  auto ab = build_example(PotentialKind::aharonov_bohm, {{"alpha", 0.5}}, 2);
  const int cutoff = 4;
  double cab = estimates::hardy_constant(ab, 2, hm, cutoff);
  // mode-wise brute force: largest per-mode quotient
  std::vector<double> w(hm.size());
  for (std::size_t i = 0; i < hm.size(); ++i) w[i] = 1.0 / (hm.nodes[i] * hm.nodes[i]);
  double oracle = 0.0;
  for (int m = -cutoff; m <= cutoff; ++m) oracle = std::max(oracle, max_rayleigh_quotient(hm, std::abs(m + 0.5), w).value);
  bool unbounded = false;
  try {
    estimates::hardy_constant(build_example(PotentialKind::aharonov_bohm, {{"alpha", 1.0}}, 2), 2, hm, cutoff);
  } catch (const Error&) {
    unbounded = true;
  }
  Verdict v;
  double gap = std::abs(cab / oracle - 1);
  v.pass = c >= 3.96 && c <= 4.0 && std::isfinite(cab) && gap <= 0.05 && unbounded;
  v.detail = "free d=3 " + fmt("%.4f", c) + ", A-B 0.5 " + fmt("%.4f", cab) + " vs mode oracle " +
             fmt("%.4f", oracle) + ", A-B 1.0 " + (unbounded ? "unbounded" : "bounded");
  return v;
}

Verdict c4() {
  struct Case {
    const char* name;
    PotentialSpec s;
    int d;
  };
  std::vector<Case> cases = {{"free", free3, 3},
                             {"inverse_square 0.2", build_example(PotentialKind::inverse_square, {{"nu1", 0.2}}, 3), 3},
                             {"A-B 0.5", build_example(PotentialKind::aharonov_bohm, {{"alpha", 0.5}}, 2), 2}};
  Verdict v;
  v.pass = true;
  for (const auto& c : cases) {
    auto p = spec(c.d, 1.0, 0.1, 32);
    std::vector<double> gaps;
    for (int n : {1024, 2048, 4096}) {
      auto mesh = default_mesh(p, n);
      auto g = decompose_rhs(Source{}, c.s, p, mesh);
      auto a = resolve(c.s, g, p, SolverKind::fd), b = resolve(c.s, g, p, SolverKind::green);
      double e = 0, nn = 0;
      for (std::size_t k = 0; k < a.size(); ++k) {
        std::vector<double> de(mesh->size()), dn(mesh->size());
        for (std::size_t i = 0; i < mesh->size(); ++i) {
          double wt = std::pow(mesh->nodes[i], c.d - 1);
          de[i] = std::norm(a[k].u.values[i] - b[k].u.values[i]) * wt;
          dn[i] = std::norm(b[k].u.values[i]) * wt;
        }
        e += mesh->integrate(de);
        nn += mesh->integrate(dn);
      }
      gaps.push_back(std::sqrt(e / nn));
    }
    double order = std::log2(gaps[1] / gaps[2]);
    bool ok = gaps[2] <= 1e-4 && order >= 1.8;
    v.pass = v.pass && ok;
    v.detail += std::string(v.detail.empty() ? "" : "; ") + c.name + " gap " + fmt("%.2g", gaps[2]) + " order " +
                fmt("%.2f", order);
  }
  return v;
}

Verdict c5() {
  auto t0 = std::chrono::steady_clock::now();
  auto p = spec(3, 1.0, 0.01, 64);
  estimates::Extras ex;
  auto s = estimates::sweep_estimate(estimates::EstimateKind::bp, free3, Source{}, p, {0.1, 1, 10, 100},
                                     {0.1, 0.01, 0.001}, ex);
  auto on = estimates::operator_norm_sweep(free3, p, {0.1, 1, 10, 100}, {0.1, 0.01, 0.001});
  double t = seconds_since(t0);
  Verdict v;
  v.pass = s.dispersion <= 4.0 && s.trend_exponent >= -0.2 && s.trend_exponent <= 0.2 && t <= 120.0;
  v.detail = "fixed-f ratio dispersion " + fmt("%.3g", s.dispersion) + ", trend " + fmt("%.3f", s.trend_exponent) +
             " (" + fmt("%.1fs", t) + "); operator norm for information: dispersion " + fmt("%.3g", on.dispersion) +
             ", trend " + fmt("%.3f", on.trend_exponent);
  return v;
}

Verdict c6() {
  std::vector<double> src, plain;
  for (double r_max : {32.0, 64.0, 128.0}) {
    auto p = spec(3, 1.0, 0.0, r_max);
    estimates::Extras ex;
    ex.mesh = default_mesh(p, (int)(64 * r_max));
    auto r = estimates::verify_estimate(estimates::EstimateKind::src, free3, Source{}, p, ex);
    src.push_back(r.lhs);
    plain.push_back(r.extras.at("unshifted_sup"));
  }
  double drift = std::max(std::abs(src[1] / src[0] - 1), std::abs(src[2] / src[1] - 1));
  double g1 = plain[1] / plain[0], g2 = plain[2] / plain[1];
  Verdict v;
  v.pass = std::isfinite(src[2]) && drift <= 0.05 && g1 >= 1.6 && g2 >= 1.6;
  v.detail = "shifted sup " + fmt("%.5g", src[2]) + ", drift on doubling " + fmt("%.2g", drift) +
             "; unshifted growth " + fmt("%.2f", g1) + ", " + fmt("%.2f", g2);
  return v;
}

Verdict c7() {
  Verdict v;
  v.pass = true;
  for (int modes : {1, 2}) {
    auto p = spec(3, 1.0, 0.0, 64);
    p.mode_cutoff = modes - 1;
    Source f;
    if (modes == 2) f.harmonics = {{0, 0, 1.0}, {1, 0, 0.5}};
    auto mesh = default_mesh(p, 4096);
    auto g = decompose_rhs(f, free3, p, mesh);
    auto u = resolve(free3, g, p);
    auto r = farfield::cross_section(u, g, farfield::dyadic_window(*mesh, f.support_max(), 5));
    double gap = std::abs(r.mass / r.mass_direct - 1);
    v.pass = v.pass && gap <= 1e-3;
    v.detail += std::string(v.detail.empty() ? "" : "; ") + std::to_string(modes) + "-mode gap " + fmt("%.2g", gap);
  }
  return v;
}

Verdict c8() {
  auto p = spec(3, 1.0, 0.0, 4);
  auto mesh = default_mesh(p, 4096);
  Source b;
  b.profile = Profile::bump;
  auto full = farfield::spectral_reconstruction(free3, b, p, farfield::log_grid(1e-2, 400, 64), mesh);
  auto cut = farfield::spectral_reconstruction(free3, b, p, farfield::log_grid(10, 400, 64), mesh);
  Verdict v;
  v.pass = std::abs(full.coverage - 1) <= 0.01 && !full.warning && cut.warning && cut.reconstructed < cut.actual;
  v.detail = "coverage " + fmt("%.4f", full.coverage) + ", truncated grid coverage " + fmt("%.3f", cut.coverage) +
             (cut.warning ? " with warning" : " without warning");
  return v;
}

Verdict c9() {
  auto p = spec(3, 1.0, 0.0, 128);
  auto mesh = default_mesh(p, 2048);
  Source f;
  f.profile = Profile::gaussian;
  f.center = 4;
  f.width = 1;
  evolution::SmoothingCurve c;
  evolution::smoothing_check(free3, [](double r) { return 1.0 / (r * r); }, f, p, mesh, {}, &c);
  Verdict v;
  v.pass = c.saturated && c.saturation <= 0.1;
  v.detail = "I(T)-I(T/2) over I(T/2) = " + fmt("%.3f", c.saturation) + " at T = " + fmt("%.1f", c.T_window) +
             ", reflection time " + fmt("%.1f", c.T_reflect);
  return v;
}

Verdict c10() {
  auto s = norms::slab_weight_scan(5, 3, 1.005, 2.5, {16, 32, 64, 128});
  double gap = std::abs(s.exponent / s.stated_exponent - 1);
  Verdict v;
  v.pass = gap <= 0.10 && s.omega_spread <= 0.10;
  v.detail = "measured exponent " + fmt("%.4f", s.exponent) + " vs predicted " + fmt("%.4f", s.stated_exponent) +
             " (" + fmt("%.1f%%", 100 * gap) + "), weight norm spread " + fmt("%.1f%%", 100 * s.omega_spread);
  return v;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict c11() {
  auto root = fs::temp_directory_path() / ("maghelm_acc_" + std::to_string(::getpid()));
  fs::remove_all(root);
  Verdict v;
  v.pass = true;
  std::vector<std::pair<std::string, std::string>> runs = {{"estimates", "bp_sweep.json"},
                                                            {"farfield", "farfield_two_mode.json"}};
  for (const auto& [cmd, file] : runs) {
    std::vector<std::string> bytes;
    for (const char* threads : {"1", "1", "4", "4"}) {
      auto out = root / (cmd + "_" + std::to_string(bytes.size()));
      std::string line = std::string(MAGHELM_BIN) + " " + cmd + " --config " + MAGHELM_CONFIGS + "/" + file +
                         " --threads " + threads + " --seed 11 --out " + out.string() + " > /dev/null 2>&1";
      int rc = std::system(line.c_str());
      if (!WIFEXITED(rc) || WEXITSTATUS(rc) != 0) {
        v.pass = false;
        v.detail += cmd + " run failed; ";
      }
      bytes.push_back(slurp(out / "summary.json"));
    }
    bool same = bytes[0] == bytes[1] && bytes[2] == bytes[3];
    bool across = bytes[0] == bytes[2];
    v.pass = v.pass && same && !bytes[0].empty();
    v.detail += cmd + (same ? " repeat identical" : " repeat differs") + (across ? ", 1 vs 4 threads identical; " : ", 1 vs 4 threads differ; ");
  }
  fs::remove_all(root);
  if (v.detail.size() > 2) v.detail.resize(v.detail.size() - 2);
  return v;
}

}  // namespace

int main() {
  std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"key identity closure, quadratic multiplier", c1},
      {"alpha=1 identity closure, cubic multiplier", c2},
      {"Hardy constants", c3},
      {"fd against Hankel-Green", c4},
      {"uniformity of the resolvent ratio in lambda", c5},
      {"radiation-condition sharpness", c6},
      {"cross-section mass identity", c7},
      {"spectral reconstruction", c8},
      {"smoothing saturation", c9},
      {"slab weight exponent", c10},
      {"determinism of summary.json", c11}};
  int passed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    auto t0 = std::chrono::steady_clock::now();
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.detail = std::string("error: ") + e.what();
    }
    passed += v.pass;
    std::printf("criterion %zu %s: %s (%s) [%.1fs]\n", i + 1, v.pass ? "PASS" : "FAIL", criteria[i].first,
                v.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", passed, criteria.size());
  return 0;
}
