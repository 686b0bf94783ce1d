#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "maghelm/model.hpp"

namespace maghelm {

using Point = std::vector<double>;
using Matrix = std::vector<std::vector<double>>;

enum class PotentialKind { free, monopole, aharonov_bohm, inverse_square, coulomb_type, custom_radial, custom_field };

const char* to_string(PotentialKind k);
PotentialKind potential_kind_from_string(const std::string& s);

/// Electromagnetic pair (A, V). custom_radial: V = v(|x|), A = a(|x|) x (a pure gauge).
/// custom_field: arbitrary A, V = 0; not radial-compatible.
struct PotentialSpec {
  PotentialKind kind = PotentialKind::free;
  int d = 3;
  double C = 0.0;          // monopole strength
  double alpha = 0.0;      // A-B flux
  double nu1 = 0.0;        // inverse-square strength
  double v_inf = 0.0;      // Coulomb-type strength (< 0)
  double alpha_exp = 1.0;  // Coulomb-type exponent in [1, 2]
  std::function<double(double)> v_radial;
  std::function<double(double)> a_radial;
  std::function<Point(const Point&)> a_field;
  bool satisfies_h1h2 = true;  // builder flag
  std::string custom_name;

  double V(const Point& x) const;
  Point A(const Point& x) const;
  double V_r(double r) const;   // V on a radial ray
  double dV_r(double r) const;  // d/dr V
  bool radial_compatible() const;
  std::string describe() const;
};

PotentialSpec build_example(PotentialKind kind, const std::map<std::string, double>& params, int d);
PotentialSpec custom_radial(std::function<double(double)> v, std::function<double(double)> a, int d,
                            std::string name = "custom");
PotentialSpec custom_field(std::function<Point(const Point&)> a, int d, std::string name = "custom");

/// B_kj = dA_k/dx_j - dA_j/dx_k (closed forms; central differences for custom kinds).
Matrix magnetic_field(const PotentialSpec& spec, const Point& x);
/// Central-difference B with relative step 1e-6, the cross-check path.
Matrix magnetic_field_fd(const PotentialSpec& spec, const Point& x);
/// (B_tau)_j = sum_k x_k/|x| B_kj
Point tangential_field(const PotentialSpec& spec, const Point& x);
/// m(x) = sum_j x_j int_0^1 A_j(t x) dt; nullopt when a component integral diverges at t = 0.
std::optional<double> cromstrom_gauge(const PotentialSpec& spec, const Point& x);
double divergence_fd(const PotentialSpec& spec, const Point& x);

struct HypothesisReport {
  double A_V = 0.0;
  double A_B = 0.0;
  double nu = 0.0;
  bool h3_ok = false;
  double h3_c = 0.0, h3_C = 0.0, h3_alpha = 0.0;
  double h3_violation_r = 0.0;  // first radius where no (H3) witness fits, when !h3_ok
  bool stable = false;          // mesh-doubling change <= 2%
  bool satisfied = false;       // A_V + 2 A_B < 1 and stable
  std::string notes;
};

/// Discrete best constants of (H1), (H2) over the modes up to the cutoff, plus an (H3) scan.
HypothesisReport check_hypotheses(const PotentialSpec& spec, const RadialMesh& mesh, int mode_cutoff);

struct QuotientResult {
  double value = 0.0;
  bool converged = false;
  bool indefinite = false;  // discrete form lost positivity
  int iterations = 0;
};

/// max over w (Dirichlet at both mesh ends) of sum b_i W_i |w_i|^2 / (reduced Dirichlet form with index nu0),
/// by power iteration on K^{-1} M.
QuotientResult max_rayleigh_quotient(const RadialMesh& mesh, double nu0, const std::vector<double>& weight,
                                     double tol = 1e-8, int max_iter = 20000);

/// Geometric mesh spanning many decades, used for Hardy-type best constants.
RadialMesh hardy_mesh(int n = 4096, double log_half_range = 40.0);

}  // namespace maghelm
