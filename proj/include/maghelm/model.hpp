#pragma once

#include <complex>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace maghelm {

using cplx = std::complex<double>;

/// Domain error carrying a short, stable message.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Sign { plus, minus };

const char* to_string(Sign s);
Sign sign_from_string(const std::string& s);

/// Parameters of (grad+iA)^2 u + V u + (lambda +- i eps) u = f on the shell r_min <= |x| <= r_max.
struct ProblemSpec {
  int d = 3;
  double lambda = 1.0;
  double epsilon = 0.0;
  Sign sign = Sign::plus;
  double r_min = 1e-3;
  double r_max = 64.0;
  int mode_cutoff = 0;

  /// lambda +- i eps
  cplx z() const;
  /// sqrt(lambda + i eps) on the principal branch; conjugated for the minus sign.
  cplx k() const;
};

ProblemSpec validate_spec(const ProblemSpec& spec);

enum class Grading { geometric, uniform };

struct RadialMesh {
  std::vector<double> nodes;
  std::vector<double> weights;  // trapezoid
  Grading grading = Grading::geometric;

  std::size_t size() const { return nodes.size(); }
  double r_min() const { return nodes.front(); }
  double r_max() const { return nodes.back(); }
  double h(std::size_t i) const { return nodes[i + 1] - nodes[i]; }

  /// Geometric from r_min to 1, uniform beyond; integer radii land on nodes when r_max is an integer.
  static RadialMesh graded(double r_min, double r_max, int n_target = 4096);
  static RadialMesh uniform(double r_min, double r_max, int n);
  /// Constant ratio over the whole range.
  static RadialMesh logarithmic(double r_min, double r_max, int n);
  static RadialMesh from_nodes(std::vector<double> nodes, Grading g);

  /// Refined copy: each interval halved.
  RadialMesh refined() const;
  std::size_t nearest(double r) const;
  double integrate(const std::vector<double>& f) const;
};

using MeshPtr = std::shared_ptr<const RadialMesh>;

MeshPtr make_mesh(RadialMesh m);
MeshPtr default_mesh(const ProblemSpec& spec, int n_target = 4096);

/// Angular mode label. For d=3, index is l (or the n-th angular eigenvalue for
/// non-separable fields) and azimuth is m; for d=2 index is m.
struct ModeIndex {
  int d = 3;
  int index = 0;
  int azimuth = 0;
  double nu_eff = 0.5;       // magnetic Bessel index, V not included
  double tangential = 0.0;   // eigenvalue of the magnetic Laplace-Beltrami part

  std::string label() const;
  bool operator==(const ModeIndex& o) const { return d == o.d && index == o.index && azimuth == o.azimuth; }
  bool operator<(const ModeIndex& o) const;
};

ModeIndex free_mode(int d, int index, int azimuth = 0);

/// Samples of one angular mode's profile. reduced=true stores w = r^{(d-1)/2} u.
struct RadialField {
  MeshPtr mesh;
  std::vector<cplx> values;
  ModeIndex mode;
  bool reduced = false;

  RadialField() = default;
  RadialField(MeshPtr m, std::vector<cplx> v, ModeIndex mi, bool red);

  RadialField to_reduced() const;
  RadialField to_plain() const;
  std::size_t size() const { return values.size(); }
};

/// Sampled bundle of modes; each entry is one angular component.
using Bundle = std::vector<RadialField>;

struct EstimateReport {
  std::string kind;
  double lhs = 0.0;
  double rhs = 1.0;
  double ratio = 0.0;
  ProblemSpec params;
  std::string notes;
  std::map<std::string, double> extras;
};

EstimateReport make_report(std::string kind, double lhs, double rhs, const ProblemSpec& params,
                           std::string notes = {});

inline double half_dim(int d) { return 0.5 * (d - 1); }

}  // namespace maghelm
