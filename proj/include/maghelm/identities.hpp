#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "maghelm/model.hpp"
#include "maghelm/potentials.hpp"
#include "maghelm/radial_solver.hpp"

namespace maghelm::identities {

enum class MultiplierKind { quadratic, cubic, piecewise, custom };
const char* to_string(MultiplierKind k);
MultiplierKind multiplier_from_string(const std::string& s);

/// psi radial; psi' and psi'' analytic for built-ins, psi'' by central differences for custom.
struct MultiplierSpec {
  MultiplierKind kind = MultiplierKind::quadratic;
  double R1 = 8.0;                           // piecewise kink
  std::function<double(double)> custom_dpsi;  // psi'
};

struct MultiplierSamples {
  std::vector<double> psi1, psi2, psi1_over_r, d_psi1_over_r;
};

MultiplierSamples multiplier_eval(const MultiplierSpec& m, const RadialMesh& mesh);

struct IdentityResidual {
  std::string id;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double scale = 0.0;
  double relative = 0.0;
  double boundary_correction = 0.0;
  std::map<std::string, double> terms;
};

/// Radial test function phi and phi'.
struct TestFunction {
  std::function<double(double)> phi;
  std::function<double(double)> dphi;
};
TestFunction constant_test_function(double c = 1.0);

/// Real-part energy identity and imaginary-part identity with a radial test function.
std::pair<IdentityResidual, IdentityResidual> symmetric_antisymmetric_residuals(const SolutionBundle& u,
                                                                                const Bundle& f,
                                                                                const TestFunction& phi,
                                                                                const PotentialSpec& spec,
                                                                                const ProblemSpec& problem);

/// Both sides of the key multiplier identity with its truncation flux.
IdentityResidual morawetz_residual(const SolutionBundle& u, const Bundle& f, const MultiplierSpec& m,
                                   const PotentialSpec& spec, const ProblemSpec& problem);

/// Constant-coefficient identity with the cubic multiplier.
IdentityResidual alpha1_residual(const SolutionBundle& u, const Bundle& f, const PotentialSpec& spec,
                                 const ProblemSpec& problem);

}  // namespace maghelm::identities
