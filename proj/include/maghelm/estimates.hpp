#pragma once

#include <functional>
#include <string>
#include <vector>

#include "maghelm/model.hpp"
#include "maghelm/potentials.hpp"
#include "maghelm/radial_solver.hpp"

namespace maghelm::estimates {

enum class EstimateKind { thm1_alpha0, thm1_large_eps, bp, src, morrey, surface, weighted_w1, grad_abs2 };
const char* to_string(EstimateKind k);
EstimateKind kind_from_string(const std::string& s);

struct Extras {
  double R0 = 2.0;                      // grad_abs2: supp f inside B(0, R0)
  double R = 1.0;                       // grad_abs2: shell [R, 2R]; R < 1 selects the unit ball
  std::function<double(double)> omega;  // weighted_w1: radial weight
  MeshPtr mesh;                         // default_mesh(problem) when empty
};

/// Solves once and evaluates one inequality as lhs / rhs.
EstimateReport verify_estimate(EstimateKind kind, const PotentialSpec& spec, const Source& f,
                               const ProblemSpec& problem, const Extras& extras = {});

/// Same, on an already computed solution.
EstimateReport evaluate_estimate(EstimateKind kind, const PotentialSpec& spec, const SolutionBundle& u,
                                 const Bundle& g, const ProblemSpec& problem, const Extras& extras = {});

struct HardyResult {
  double value = 0.0;     // best constant on the given mesh
  double wide = 0.0;      // same on the squared range
  double nu_min = 0.0;    // extremal magnetic index
  bool bounded = true;
  int iterations = 0;
};

HardyResult hardy_report(const PotentialSpec& spec, int d, const RadialMesh& mesh, int mode_cutoff);
/// Best constant of int |u|^2/|x|^2 <= C int |grad_A u|^2; throws "no Hardy inequality" when unbounded.
double hardy_constant(const PotentialSpec& spec, int d, const RadialMesh& mesh, int mode_cutoff);

/// Best c of int |g|^2 w <= c int |grad_A g|^2 for a radial weight; throws when w is not a Sobolev weight.
double sobolev_constant(const PotentialSpec& spec, int d, const std::function<double(double)>& w, int mode_cutoff);

struct SweepPoint {
  double lambda = 0.0, epsilon = 0.0;
  EstimateReport report;
  bool converged = true;
  int iterations = 0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  double dispersion = 0.0;      // max / min
  double trend_exponent = 0.0;  // least-squares slope of log ratio vs log lambda
};

void summarize(SweepResult& s);

SweepResult sweep_estimate(EstimateKind kind, const PotentialSpec& spec, const Source& f, const ProblemSpec& base,
                           const std::vector<double>& lambdas, const std::vector<double>& epsilons,
                           const Extras& extras = {});

/// || |x|^{-1} R(lambda +- i eps) |x|^{-1} ||_{L^2 -> L^2} per grid point by power iteration on T*T.
SweepResult operator_norm_sweep(const PotentialSpec& spec, const ProblemSpec& base, const std::vector<double>& lambdas,
                                const std::vector<double>& epsilons, int max_iter = 30, double tol = 1e-4);

/// int |u|^2 w^{1/2}/|x| against int |f|^2 |x|/w^{1/2}; extras carry c(w) and the two endpoint ratios.
EstimateReport verify_w1(const PotentialSpec& spec, const std::function<double(double)>& w, const Source& f,
                         const ProblemSpec& problem, MeshPtr mesh = nullptr);

}  // namespace maghelm::estimates
