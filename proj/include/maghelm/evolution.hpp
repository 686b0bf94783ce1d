#pragma once

#include <functional>
#include <vector>

#include "maghelm/model.hpp"
#include "maghelm/potentials.hpp"
#include "maghelm/radial_solver.hpp"

namespace maghelm::evolution {

/// Dirichlet truncation of one mode, eps = 0. Energies E_n are the eigenvalues of -H_A on the mode,
/// so e^{i H_A t} v_n = e^{-i E_n t} v_n.
struct ModeEigensystem {
  std::vector<double> eigenvalues;                // ascending
  std::vector<std::vector<double>> eigenvectors;  // reduced profiles, zero at both ends, trapezoid-orthonormal
  ModeIndex mode;
  MeshPtr mesh;
};

ModeEigensystem eigendecompose(const EffectiveRadialOp& op, const MeshPtr& mesh);

/// max over pairs of ||K v - E B v||_{B^{-1}} / ||v||_B
double eigen_residual(const ModeEigensystem& eig, const EffectiveRadialOp& op);
/// max |<v_i, v_j>_B - delta_ij|
double orthonormality_defect(const ModeEigensystem& eig);

/// e^{i H_A t} f for one mode; returns a reduced field.
RadialField propagate(const ModeEigensystem& eig, const RadialField& f, double t);

/// Trapezoid-weighted L^2 norm of a field (plain or reduced).
double l2_norm(const RadialField& f);

struct SmoothingOptions {
  std::vector<double> horizons;      // increasing; empty means doubling up to the crossing time
  double retain_tol = 1e-10;         // dropped coefficient mass relative to ||f||^2
  std::function<double(double)> forcing_time;  // F(x,t) = f(x) g(t), u(0) = 0, when set
};

struct SmoothingCurve {
  std::vector<double> T, I;
  double norm2 = 0.0;       // ||f||^2, or the forcing weighted norm on the Duhamel path
  double lambda_bar = 0.0;  // mean energy of f
  double T_reflect = 0.0;   // 2 (r_max - supp) / (2 sqrt(lambda_bar))
  double T_window = 0.0;   // largest horizon before T_reflect and before the first kink
  bool kink = false;        // a doubling increment grew: wall reflection returned
  double dt = 0.0;
  int retained = 0;
  double saturation = 0.0;  // (I(T) - I(T/2)) / I(T/2) at the largest horizon inside the window
  bool saturated = false;
};

/// I(T) = int_0^T int |e^{itH} f|^2 w^{1/2}/|x| dx dt on the Dirichlet truncation.
SmoothingCurve smoothing_curve(const PotentialSpec& spec, const std::function<double(double)>& w, const Source& f,
                               const ProblemSpec& problem, const MeshPtr& mesh, const SmoothingOptions& opt = {});

/// Report with lhs = I(T) at the largest reflection-free horizon and rhs = the data norm.
EstimateReport smoothing_check(const PotentialSpec& spec, const std::function<double(double)>& w, const Source& f,
                               const ProblemSpec& problem, const MeshPtr& mesh, const SmoothingOptions& opt = {},
                               SmoothingCurve* curve = nullptr);

}  // namespace maghelm::evolution
