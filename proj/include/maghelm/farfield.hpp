#pragma once

#include <string>
#include <vector>

#include "maghelm/model.hpp"
#include "maghelm/potentials.hpp"
#include "maghelm/radial_solver.hpp"

namespace maghelm::farfield {

/// Per-mode sqrt(lambda) r^{(d-1)/2} e^{-i sqrt(lambda) r} u_mode(r) at a mesh node.
std::vector<cplx> sphere_trace(const SolutionBundle& u, double r);

struct DrTrace {
  std::vector<double> radii;
  std::vector<cplx> values;     // int_{|x|=r} (D_r u) conj(v)
  double decay_exponent = 0.0;  // log-log slope of |values| over the last decade of radii
};

/// D_r u = u' - i sqrt(lambda) u + (d-1)/(2r) u paired with v on spheres.
DrTrace dr_flux(const SolutionBundle& u, const SolutionBundle& v, const std::vector<double>& radii);

struct FarFieldResult {
  std::vector<double> radii;
  std::vector<ModeIndex> modes;
  std::vector<std::vector<cplx>> coefficients;  // [radius][mode]
  std::vector<cplx> limit;                      // extrapolated to r = infinity
  double mass = 0.0;                            // int G_lambda d sigma
  double mass_direct = 0.0;                     // lambda^{1/2} Im int f conj(u)
  double convergence_rate = 0.0;                // slope of log |successive differences| vs log r
  double damping_rate = 0.0;                    // -d/dr log |F| fitted over the window
};

/// Dyadic radii in (supp f, r_max], at most the last `window`, landing on mesh nodes.
std::vector<double> dyadic_window(const RadialMesh& mesh, double support, int window = 8);

/// Far-field coefficients, their limit, and both sides of the total-mass identity.
FarFieldResult cross_section(const SolutionBundle& u, const Bundle& f, const std::vector<double>& radii);

/// G_lambda(omega) = |sum_m F_m Theta_m(omega)|^2 from the limit coefficients.
double cross_section_value(const FarFieldResult& r, const PotentialSpec& spec, double theta, double phi);

struct SpectralResult {
  std::vector<double> lambdas;
  std::vector<double> densities;  // (1/pi) Im int f conj(R(lambda + i0) f)
  double reconstructed = 0.0;
  double actual = 0.0;
  double coverage = 0.0;  // reconstructed / actual
  bool warning = false;
  std::string notes;
};

std::vector<double> log_grid(double lo, double hi, int n);

/// (1/pi) int lambda^{-1/2} mu_lambda(S^{d-1}) d lambda by trapezoid in log lambda, against int |f|^2.
SpectralResult spectral_reconstruction(const PotentialSpec& spec, const Source& f, const ProblemSpec& base,
                                       const std::vector<double>& lambdas, const MeshPtr& mesh,
                                       double coverage_threshold = 0.99);

}  // namespace maghelm::farfield
