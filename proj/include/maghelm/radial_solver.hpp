#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "maghelm/model.hpp"
#include "maghelm/potentials.hpp"

namespace maghelm {

/// w'' - mu_eff/r^2 w + V_extra w + (lambda +- i eps) w = g, mu_eff = nu^2 - 1/4.
struct EffectiveRadialOp {
  double nu_eff = 0.5;
  double mu_eff = 0.0;
  std::function<double(double)> V_extra;  // empty when zero
  ModeIndex mode;

  double v_extra(double r) const { return V_extra ? V_extra(r) : 0.0; }
};

enum class SolverKind { fd, green };
const char* to_string(SolverKind k);

struct ModeSolution {
  RadialField u;   // plain
  RadialField du;  // d/dr u
  ModeIndex mode;
  ProblemSpec spec;
  SolverKind solver = SolverKind::fd;
  double nu = 0.5;  // full Bessel index of the reduced operator
};

using SolutionBundle = std::vector<ModeSolution>;

enum class Profile { annulus, gaussian, bump, custom };
const char* to_string(Profile p);
Profile profile_from_string(const std::string& s);

struct HarmonicTerm {
  int l = 0;
  int m = 0;
  cplx coef = 1.0;
};

/// f(x) = h(|x|) * sum c_lm Y_lm(x/|x|); no terms means f = h(|x|).
struct Source {
  Profile profile = Profile::annulus;
  double a = 1.0, b = 2.0;                // annulus / bump support
  double center = 1.5, width = 0.25;      // gaussian
  std::function<double(double)> custom;
  std::vector<HarmonicTerm> harmonics;
  double amplitude = 1.0;

  /// h(r); annulus edges take the mean of the one-sided values.
  double radial(double r) const;
  double support_max() const;
};

EffectiveRadialOp effective_index(const PotentialSpec& spec, const ModeIndex& mode, const ProblemSpec& problem);

/// Reduced per-mode right-hand sides g = r^{(d-1)/2} f_mode (zero modes dropped).
Bundle decompose_rhs(const Source& f, const PotentialSpec& spec, const ProblemSpec& problem, const MeshPtr& mesh);

ModeSolution solve_mode_fd(const EffectiveRadialOp& op, const RadialField& g, const ProblemSpec& problem);
ModeSolution solve_mode_green(const EffectiveRadialOp& op, const RadialField& g, const ProblemSpec& problem);

/// R(lambda +- i eps) f with the fd solver, one solution per populated mode.
SolutionBundle resolve(const PotentialSpec& spec, const Bundle& g, const ProblemSpec& problem,
                       SolverKind solver = SolverKind::fd);
SolutionBundle resolve(const PotentialSpec& spec, const Source& f, const ProblemSpec& problem, const MeshPtr& mesh,
                       SolverKind solver = SolverKind::fd);

struct LapResult {
  std::vector<double> eps;
  std::vector<SolutionBundle> solutions;
  SolutionBundle limit;                 // eps = 0 outgoing solve
  double R_loc = 8.0;                   // distances are taken on r <= R_loc
  std::vector<double> distances;        // relative H1(r <= R_loc) distance between consecutive eps
  std::vector<double> limit_distances;  // relative H1(r <= R_loc) distance to the eps = 0 solve
  double extrapolated_distance = 0.0;   // Richardson limit of the last two solves against the eps = 0 solve
  bool monotone = false;
  bool geometric = false;
};

LapResult limiting_absorption(const PotentialSpec& spec, const Source& f, const ProblemSpec& problem,
                              const MeshPtr& mesh, const std::vector<double>& eps_sequence, double R_loc = 8.0);

/// (int_{r <= R} |u-v|^2 + |u'-v'|^2 r^{d-1} dr)^{1/2} summed over matching modes.
double h1_distance(const SolutionBundle& a, const SolutionBundle& b, double R = INFINITY);
double h1_norm(const SolutionBundle& a, double R = INFINITY);

}  // namespace maghelm
