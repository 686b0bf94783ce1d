#include "maghelm/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "maghelm/estimates.hpp"
#include "maghelm/evolution.hpp"
#include "maghelm/farfield.hpp"
#include "maghelm/norms.hpp"

namespace maghelm::runner {

using nlohmann::json;
namespace fs = std::filesystem;
using config::Command;
using config::RunConfig;

EstimateReport to_report(const identities::IdentityResidual& r, const ProblemSpec& p) {
  EstimateReport e;
  e.kind = "identity_" + r.id;
  e.lhs = r.lhs;
  e.rhs = r.rhs;
  e.ratio = r.relative;
  e.params = p;
  e.extras = r.terms;
  e.extras["residual"] = r.residual;
  e.extras["scale"] = r.scale;
  e.extras["boundary_correction"] = r.boundary_correction;
  return e;
}

namespace {

struct Artifacts {
  std::vector<std::pair<std::string, std::string>> files;  // name, bytes
};

struct Ctx {
  const RunConfig& cfg;
  Outcome& out;
  Artifacts& art;
  std::string hash;

  void add(EstimateReport e, int nodes, const std::string& solver = "fd") {
    out.rows.push_back({std::move(e), {hash, nodes, solver}});
  }
  void check(const std::string& name, bool ok, const std::string& detail) {
    out.assertions.push_back({name, ok, detail});
  }
  double tol(double def) const { return cfg.options.tol >= 0 ? cfg.options.tol : def; }
};

std::string fmt(double v) { return report::number(v); }

std::vector<int> ladder(const RunConfig& c) {
  if (!c.sweep.nodes.empty()) return c.sweep.nodes;
  return {c.nodes / 4, c.nodes / 2, c.nodes};
}

// int |a - b|^2 r^{d-1} over matching modes, and int |b|^2 r^{d-1}
std::pair<double, double> l2_gap(const SolutionBundle& a, const SolutionBundle& b) {
  double num = 0.0, den = 0.0;
  for (const auto& x : a)
    for (const auto& y : b) {
      if (!(x.mode == y.mode)) continue;
      const auto& m = *x.u.mesh;
      std::vector<double> e(m.size()), n(m.size());
      for (std::size_t i = 0; i < m.size(); ++i) {
        double w = std::pow(m.nodes[i], x.mode.d - 1);
        e[i] = std::norm(x.u.values[i] - y.u.values[i]) * w;
        n[i] = std::norm(y.u.values[i]) * w;
      }
      num += m.integrate(e);
      den += m.integrate(n);
    }
  return {num, den};
}

void run_solve(Ctx& c) {
  const auto& cfg = c.cfg;
  auto mesh = default_mesh(cfg.problem, cfg.nodes);
  SolverKind kind = cfg.options.solver == "green" ? SolverKind::green : SolverKind::fd;
  auto u = resolve(cfg.potential, cfg.f, cfg.problem, mesh, kind);
  auto e = make_report("solution", norms::weighted_l2(u, 0.0), 1.0, cfg.problem, "int |u|^2");
  e.extras["h1_norm"] = h1_norm(u);
  e.extras["modes"] = (double)u.size();
  c.add(e, (int)mesh->size(), to_string(kind));
  std::ostringstream t;
  t << "mode,r,re_u,im_u\n";
  for (const auto& s : u)
    for (std::size_t i = 0; i < mesh->size(); ++i)
      t << s.mode.label() << ',' << fmt(mesh->nodes[i]) << ',' << fmt(s.u.values[i].real()) << ','
        << fmt(s.u.values[i].imag()) << '\n';
  c.art.files.push_back({"solution.csv", t.str()});
  if (cfg.options.compare) {
    auto other = resolve(cfg.potential, cfg.f, cfg.problem, mesh, kind == SolverKind::fd ? SolverKind::green : SolverKind::fd);
    auto [num, den] = l2_gap(u, other);
    double rel = den > 0 ? std::sqrt(num / den) : std::sqrt(num);
    auto r = make_report("solver_gap", std::sqrt(num), std::sqrt(den), cfg.problem, "relative L2 fd against green");
    c.add(r, (int)mesh->size(), "fd|green");
    c.check("fd_green_agreement", rel <= c.tol(1e-4), "relative L2 gap " + fmt(rel));
  }
}

void run_identity(Ctx& c) {
  const auto& cfg = c.cfg;
  std::vector<std::string> names = cfg.options.multipliers;
  if (names.empty()) names = {"quadratic"};
  struct Point {
    int nodes;
    double h;
    std::vector<identities::IdentityResidual> res;
  };
  std::vector<Point> pts;
  for (int n : ladder(cfg)) {
    auto mesh = default_mesh(cfg.problem, n);
    auto g = decompose_rhs(cfg.f, cfg.potential, cfg.problem, mesh);
    auto u = resolve(cfg.potential, g, cfg.problem);
    Point p{(int)mesh->size(), 0.0, {}};
    for (std::size_t i = 0; i + 1 < mesh->size(); ++i) p.h = std::max(p.h, mesh->h(i));
    for (const auto& name : names) {
      if (name == "alpha1") {
        p.res.push_back(identities::alpha1_residual(u, g, cfg.potential, cfg.problem));
      } else if (name == "energy") {
        auto [re, im] = identities::symmetric_antisymmetric_residuals(u, g, identities::constant_test_function(),
                                                                     cfg.potential, cfg.problem);
        p.res.push_back(re);
        p.res.push_back(im);
      } else {
        identities::MultiplierSpec m;
        try {
          m.kind = identities::multiplier_from_string(name);
        } catch (const Error& e) {
          throw config::ConfigError(e.what());
        }
        m.R1 = cfg.options.R1;
        p.res.push_back(identities::morawetz_residual(u, g, m, cfg.potential, cfg.problem));
      }
    }
    for (const auto& r : p.res) {
      auto e = to_report(r, cfg.problem);
      e.extras["nodes"] = p.nodes;
      e.extras["h_max"] = p.h;
      c.add(e, p.nodes);
    }
    pts.push_back(std::move(p));
  }
  std::ostringstream t;
  t << "identity,nodes,h_max,relative,reduction\n";
  report::Plot plot{"identity residual against mesh width", "h_max", "relative residual", true, true, {}};
  const double floor = 1e-11;  // roundoff level: no order to measure below it
  for (std::size_t k = 0; k < pts.front().res.size(); ++k) {
    report::Series s{pts.front().res[k].id, {}, {}};
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const auto& r = pts[j].res[k];
      double red = j > 0 && r.relative > 0 ? pts[j - 1].res[k].relative / r.relative : NAN;
      t << r.id << ',' << pts[j].nodes << ',' << fmt(pts[j].h) << ',' << fmt(r.relative) << ','
        << (j > 0 ? fmt(red) : "") << '\n';
      s.x.push_back(pts[j].h);
      s.y.push_back(r.relative);
      if (j > 0 && pts[j - 1].res[k].relative > floor)
        c.check(r.id + "_order_" + std::to_string(pts[j].nodes), red >= 3.0,
                "residual reduction " + fmt(red) + " on doubling to " + std::to_string(pts[j].nodes));
    }
    const auto& fin = pts.back().res[k];
    c.check(fin.id + "_closure", fin.relative <= c.tol(1e-5),
            "relative residual " + fmt(fin.relative) + " at " + std::to_string(pts.back().nodes) + " nodes");
    plot.series.push_back(std::move(s));
  }
  c.art.files.push_back({"identity.csv", t.str()});
  c.art.files.push_back({"identity.svg", report::svg_plot(plot)});
}

void run_estimates(Ctx& c) {
  const auto& cfg = c.cfg;
  std::vector<std::string> kinds = cfg.options.kinds;
  if (kinds.empty()) kinds = {"bp"};
  std::vector<double> lam = cfg.sweep.lambdas, eps = cfg.sweep.epsilons;
  if (lam.empty()) lam = {cfg.problem.lambda};
  if (eps.empty()) eps = {cfg.problem.epsilon};
  auto mesh = default_mesh(cfg.problem, cfg.nodes);
  std::ostringstream t;
  t << "kind,points,max_ratio,min_ratio,dispersion,trend_exponent\n";
  for (const auto& k : kinds) {
    estimates::SweepResult sw;
    if (k == "operator_norm") {
      sw = estimates::operator_norm_sweep(cfg.potential, cfg.problem, lam, eps);
    } else {
      estimates::EstimateKind ek;
      try {
        ek = estimates::kind_from_string(k);
      } catch (const Error& e) {
        throw config::ConfigError(e.what());
      }
      estimates::Extras ex;
      ex.mesh = mesh;
      if (ek == estimates::EstimateKind::weighted_w1) ex.omega = [](double r) { return 1.0 / (r * r); };
      sw = estimates::sweep_estimate(ek, cfg.potential, cfg.f, cfg.problem, lam, eps, ex);
    }
    bool finite = true;
    for (auto& p : sw.points) {
      auto e = p.report;
      e.extras["converged"] = p.converged ? 1.0 : 0.0;
      e.extras["iterations"] = p.iterations;
      finite = finite && std::isfinite(e.ratio);
      c.add(std::move(e), (int)mesh->size());
    }
    t << k << ',' << sw.points.size() << ',' << fmt(sw.max_ratio) << ',' << fmt(sw.min_ratio) << ','
      << fmt(sw.dispersion) << ',' << fmt(sw.trend_exponent) << '\n';
    c.check(k + "_finite", finite, "all ratios finite");
    if (cfg.options.max_dispersion > 0)
      c.check(k + "_uniform", sw.dispersion <= cfg.options.max_dispersion,
              "max/min ratio " + fmt(sw.dispersion) + " against " + fmt(cfg.options.max_dispersion));
    if (cfg.options.max_trend >= 0)
      c.check(k + "_trend", std::abs(sw.trend_exponent) <= cfg.options.max_trend,
              "trend exponent " + fmt(sw.trend_exponent) + " against " + fmt(cfg.options.max_trend));
  }
  c.art.files.push_back({"sweeps.csv", t.str()});
}

void run_hardy(Ctx& c) {
  const auto& cfg = c.cfg;
  auto mesh = hardy_mesh(cfg.nodes);
  auto h = estimates::hardy_report(cfg.potential, cfg.problem.d, mesh, cfg.problem.mode_cutoff);
  auto e = make_report("hardy_constant", h.bounded ? h.value : INFINITY, 1.0, cfg.problem,
                       "best C in int |u|^2/|x|^2 <= C int |grad_A u|^2");
  e.extras["mesh_value"] = h.value;
  e.extras["wide"] = h.wide;
  e.extras["nu_min"] = h.nu_min;
  e.extras["bounded"] = h.bounded ? 1.0 : 0.0;
  e.extras["iterations"] = h.iterations;
  c.add(e, (int)mesh.size(), "rayleigh");
  if (cfg.options.expect_unbounded) {
    c.check("hardy_unbounded", !h.bounded, "bounded = " + std::string(h.bounded ? "true" : "false"));
  } else {
    c.check("hardy_bounded", h.bounded, "nu_min " + fmt(h.nu_min));
    if (!cfg.options.expect_range.empty())
      c.check("hardy_range", h.value >= cfg.options.expect_range[0] && h.value <= cfg.options.expect_range[1],
              "value " + fmt(h.value));
  }
}

void run_farfield(Ctx& c) {
  const auto& cfg = c.cfg;
  auto mesh = default_mesh(cfg.problem, cfg.nodes);
  auto g = decompose_rhs(cfg.f, cfg.potential, cfg.problem, mesh);
  auto u = resolve(cfg.potential, g, cfg.problem);
  auto radii = farfield::dyadic_window(*mesh, cfg.f.support_max(), cfg.options.window);
  auto res = farfield::cross_section(u, g, radii);
  double rel = std::abs(res.mass - res.mass_direct) / std::max(std::abs(res.mass_direct), 1e-300);
  auto e = make_report("cross_section_mass", res.mass, res.mass_direct, cfg.problem,
                       "int G dsigma against lambda^{1/2} Im int f conj(u)");
  e.extras["relative_gap"] = rel;
  e.extras["convergence_rate"] = res.convergence_rate;
  e.extras["damping_rate"] = res.damping_rate;
  e.extras["radii"] = (double)radii.size();
  auto flux = farfield::dr_flux(u, u, radii);
  e.extras["dr_flux_decay"] = flux.decay_exponent;
  c.add(e, (int)mesh->size());
  std::ostringstream t;
  t << "r,abs_F,abs_dr_flux\n";
  report::Plot plot{"far-field trace", "r", "|F(r)|", true, true, {{"|F|", {}, {}}}};
  for (std::size_t j = 0; j < radii.size(); ++j) {
    double s = 0.0;
    for (auto v : res.coefficients[j]) s += std::norm(v);
    t << fmt(radii[j]) << ',' << fmt(std::sqrt(s)) << ',' << fmt(std::abs(flux.values[j])) << '\n';
    plot.series[0].x.push_back(radii[j]);
    plot.series[0].y.push_back(std::sqrt(s));
  }
  c.art.files.push_back({"farfield.csv", t.str()});
  c.art.files.push_back({"farfield.svg", report::svg_plot(plot)});
  c.check("mass_identity", rel <= c.tol(1e-3), "relative gap " + fmt(rel));
}

void run_spectral(Ctx& c) {
  const auto& cfg = c.cfg;
  auto mesh = default_mesh(cfg.problem, cfg.nodes);
  auto lam = farfield::log_grid(cfg.options.log_lo, cfg.options.log_hi, cfg.options.log_points);
  auto res = farfield::spectral_reconstruction(cfg.potential, cfg.f, cfg.problem, lam, mesh);
  auto e = make_report("spectral", res.reconstructed, res.actual, cfg.problem, res.notes);
  e.extras["coverage"] = res.coverage;
  e.extras["warning"] = res.warning ? 1.0 : 0.0;
  c.add(e, (int)mesh->size());
  std::ostringstream t;
  t << "lambda,density\n";
  report::Plot plot{"spectral density", "lambda", "density", true, false, {{"density", lam, res.densities}}};
  for (std::size_t j = 0; j < lam.size(); ++j) t << fmt(lam[j]) << ',' << fmt(res.densities[j]) << '\n';
  c.art.files.push_back({"spectral.csv", t.str()});
  c.art.files.push_back({"spectral.svg", report::svg_plot(plot)});
  if (cfg.options.expect_warning)
    c.check("coverage_warning", res.warning, "coverage " + fmt(res.coverage));
  else
    c.check("reconstruction", !res.warning && std::abs(res.coverage - 1.0) <= c.tol(1e-2),
            "coverage " + fmt(res.coverage) + (res.notes.empty() ? "" : "; " + res.notes));
}

void run_evolve(Ctx& c) {
  const auto& cfg = c.cfg;
  auto mesh = default_mesh(cfg.problem, cfg.nodes);
  std::function<double(double)> w = [](double r) { return 1.0 / (r * r); };
  if (cfg.options.weight == "one") w = [](double) { return 1.0; };
  evolution::SmoothingOptions so;
  so.horizons = cfg.options.horizons;
  evolution::SmoothingCurve curve;
  auto e = evolution::smoothing_check(cfg.potential, w, cfg.f, cfg.problem, mesh, so, &curve);
  c.add(e, (int)mesh->size(), "spectral");
  std::ostringstream t;
  t << "T,I,in_window\n";
  report::Plot plot{"weighted space-time mass", "T", "I(T)", true, false, {{"I", curve.T, curve.I}}};
  for (std::size_t k = 0; k < curve.T.size(); ++k)
    t << fmt(curve.T[k]) << ',' << fmt(curve.I[k]) << ',' << (curve.T[k] <= curve.T_window * (1 + 1e-9) ? 1 : 0)
      << '\n';
  c.art.files.push_back({"evolve.csv", t.str()});
  c.art.files.push_back({"evolve.svg", report::svg_plot(plot)});
  c.check("saturation", curve.saturated,
          "I(T) - I(T/2) over I(T/2) = " + fmt(curve.saturation) + " at T = " + fmt(curve.T_window));
}

void run_report(Ctx& c) {
  const auto& in = c.cfg.options.input;
  if (in.empty()) throw config::ConfigError("report needs options.input");
  std::ifstream f(in, std::ios::binary);
  if (!f) throw config::ConfigError("cannot read " + in);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    throw config::ConfigError(std::string("input is not a summary: ") + e.what());
  }
  if (!j.contains("reports") || !j["reports"].is_array()) throw config::ConfigError("input has no reports");
  auto val = [](const json& v) {
    if (v.is_number()) return v.get<double>();
    std::string s = v.get<std::string>();
    return s == "nan" ? NAN : s == "inf" ? INFINITY : s == "-inf" ? -INFINITY : std::stod(s);
  };
  for (const auto& r : j["reports"]) {
    EstimateReport e;
    e.kind = r.at("kind").get<std::string>();
    e.lhs = val(r.at("lhs"));
    e.rhs = val(r.at("rhs"));
    e.ratio = val(r.at("ratio"));
    e.notes = r.at("notes").get<std::string>();
    const auto& p = r.at("params");
    e.params.d = p.at("d").get<int>();
    e.params.lambda = p.at("lambda").get<double>();
    e.params.epsilon = p.at("epsilon").get<double>();
    e.params.sign = sign_from_string(p.at("sign").get<std::string>());
    e.params.r_min = p.at("r_min").get<double>();
    e.params.r_max = p.at("r_max").get<double>();
    e.params.mode_cutoff = p.at("mode_cutoff").get<int>();
    for (auto it = r.at("extras").begin(); it != r.at("extras").end(); ++it) e.extras[it.key()] = val(*it);
    c.out.rows.push_back({e, {r.at("spec_hash").get<std::string>(), r.at("mesh_nodes").get<int>(),
                              r.at("solver").get<std::string>()}});
  }
}

void write_file(const fs::path& p, const std::string& bytes) {
  std::ofstream o(p, std::ios::binary);
  if (!o) throw Error("cannot write " + p.string());
  o << bytes;
}

}  // namespace

std::string summary_json(const RunConfig& cfg, const Outcome& o) {
  json j;
  j["command"] = to_string(cfg.command);
  j["config"] = json::parse(cfg.canonical);
  j["spec_hash"] = config::spec_hash(cfg);
  j["seed"] = cfg.seed;
  j["reports"] = json::parse(report::emit_report(o.rows, report::Format::json));
  json a = json::array();
  for (const auto& x : o.assertions) a.push_back({{"name", x.name}, {"passed", x.passed}, {"detail", x.detail}});
  j["assertions"] = a;
  j["status"] = o.status == exit_pass ? "pass" : o.status == exit_assertion ? "fail" : "error";
  j["message"] = o.message;
  if (cfg.command == Command::hardy && !o.rows.empty()) {
    double v = o.rows.front().report.lhs;
    j["hardy_constant"] = std::isfinite(v) ? json(v) : json("inf");
  }
  return j.dump(2) + "\n";
}

Outcome run(const RunConfig& cfg) {
  Outcome out;
  Artifacts art;
  Ctx c{cfg, out, art, config::spec_hash(cfg)};
  try {
    switch (cfg.command) {
      case Command::solve: run_solve(c); break;
      case Command::identity: run_identity(c); break;
      case Command::estimates: run_estimates(c); break;
      case Command::hardy: run_hardy(c); break;
      case Command::farfield: run_farfield(c); break;
      case Command::spectral: run_spectral(c); break;
      case Command::evolve: run_evolve(c); break;
      case Command::report: run_report(c); break;
    }
  } catch (const Error& e) {
    out.status = exit_config;
    out.message = e.what();
    return out;
  }
  for (const auto& a : out.assertions)
    if (!a.passed) {
      out.status = exit_assertion;
      out.message = "assertion failed: " + a.name + " (" + a.detail + ")";
      break;
    }
  fs::path dir(cfg.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    out.status = exit_config;
    out.message = "cannot create output directory " + cfg.out;
    return out;
  }
  write_file(dir / "summary.json", summary_json(cfg, out));
  for (const auto& f : cfg.options.formats) {
    auto fm = report::format_from_string(f);
    if (fm != report::Format::json) write_file(dir / ("reports." + f), report::emit_report(out.rows, fm));
  }
  for (const auto& [name, bytes] : art.files) write_file(dir / name, bytes);
  return out;
}

}  // namespace maghelm::runner
