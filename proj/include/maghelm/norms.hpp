#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "maghelm/model.hpp"
#include "maghelm/potentials.hpp"
#include "maghelm/radial_solver.hpp"

namespace maghelm::norms {

struct NormReport {
  std::string name;
  double value = 0.0;
  std::map<std::string, double> params;
};

/// sum over modes of int r^s |u_mode|^2 r^{d-1} dr (plain or reduced fields accepted)
double weighted_l2(const Bundle& u, double s);
double weighted_l2(const SolutionBundle& u, double s);
Bundle fields(const SolutionBundle& u);

/// sup over mesh radii R >= R0 of (R^{-1} int_{|x|<=R} |u|^2)^{1/2}
double ah_norm(const Bundle& u, double R0);
/// (R0 int_{|x|<=R0} |f|^2)^{1/2} + sum over dyadic shells beyond R0 of (2^{j+1} int_shell |f|^2)^{1/2}
double ah_dual(const Bundle& f, double R0);
/// Same as ah_dual, also reporting the shell mass lost beyond r_max.
NormReport ah_dual_report(const Bundle& f, double R0);

/// |||grad_A u|||_{R0}: the Agmon-Hormander norm of |u'|^2 + Lambda |u|^2 / r^2
double ah_norm_gradient(const SolutionBundle& u, double R0);

struct GradientSplit {
  double radial = 0.0;
  double tangential = 0.0;
};

/// radial: int |u'|^2; tangential: int Lambda/r^2 |u|^2 (measure r^{d-1} dr, summed over modes)
GradientSplit gradient_split(const SolutionBundle& u, const PotentialSpec& spec);
/// Same total assembled from the reduced profile w = r^{(d-1)/2} u and its derivative.
double dirichlet_form_reduced(const SolutionBundle& u);
/// int |u' -+ i sqrt(lambda) u|^2 + Lambda/r^2 |u|^2
double phase_shifted_gradient(const SolutionBundle& u, double lambda, Sign sign = Sign::plus);

/// Per-node tail T(R_i) = int_{r >= R_i} of the (optionally phase-shifted) gradient density.
std::vector<double> gradient_tail(const SolutionBundle& u, double lambda, bool shifted, Sign sign = Sign::plus);
/// int |grad_perp u|^2 / |x|
double tangential_over_r(const SolutionBundle& u);

/// Cartesian probe box for Morrey-Campanato quadrature (midpoint rule).
struct ProbeGrid {
  std::vector<double> lo, hi;
  std::vector<int> n;
};

/// sup over probe radii r of (r^{-(d - p alpha)} int_{|x|<r} |w|^p)^{1/p}; the box must contain supp w.
double morrey_campanato_norm(const std::function<double(const Point&)>& weight, int d, double alpha, double p,
                             const std::vector<double>& radii, const ProbeGrid& grid);

/// Same, for a radial weight, by 1D quadrature on a geometric grid.
double morrey_campanato_radial(const std::function<double(double)>& weight, int d, double alpha, double p,
                               const std::vector<double>& radii, int n_quad = 4000);

/// Slab weight omega_R = R^{-d(1-1/p)} on [0,1]^{d-k} x [R,2R]^k, scanned over R.
struct SlabScan {
  std::vector<double> R;
  std::vector<double> omega_norm;  // ||omega_R|| in L^{2,p}
  std::vector<double> gradient_weight_norm;  // ||omega_R^{1/2}/|x| || in L^{2,q}
  double exponent = 0.0;           // log-log slope of gradient_weight_norm
  double exact_exponent = 0.0;     // 1 - (d-k)/q - (d/2)(1-1/p)
  double stated_exponent = 0.0;    // 1 - 2/q - d(1-1/p)
  double omega_spread = 0.0;       // max/min of omega_norm - 1
};

SlabScan slab_weight_scan(int d, int k, double p, double q, const std::vector<double>& Rs, int cells_per_unit = 4);

/// Cumulative integral int_{r_min}^{R} of a nodal integrand with the linear interpolant.
double integral_upto(const RadialMesh& m, const std::vector<double>& cumulative, const std::vector<double>& f,
                     double R);
std::vector<double> cumulative(const RadialMesh& m, const std::vector<double>& f);

}  // namespace maghelm::norms
