#include "maghelm/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace maghelm {

const char* to_string(Sign s) { return s == Sign::plus ? "plus" : "minus"; }

Sign sign_from_string(const std::string& s) {
  if (s == "plus" || s == "+") return Sign::plus;
  if (s == "minus" || s == "-") return Sign::minus;
  throw Error("unknown sign '" + s + "'");
}

cplx ProblemSpec::z() const {
  return {lambda, sign == Sign::plus ? epsilon : -epsilon};
}

cplx ProblemSpec::k() const {
  cplx kp = std::sqrt(cplx(lambda, epsilon));
  if (kp.imag() < 0) kp = -kp;
  return sign == Sign::plus ? kp : std::conj(kp);
}

ProblemSpec validate_spec(const ProblemSpec& spec) {
  if (spec.d != 2 && spec.d != 3) throw Error("unsupported dimension");
  if (spec.lambda == 0.0 && spec.epsilon == 0.0) throw Error("degenerate spectral parameter");
  if (!(spec.epsilon >= 0.0)) throw Error("negative absorption");
  if (!(spec.r_min > 0.0)) throw Error("r_min must be positive");
  if (!(spec.r_min < spec.r_max)) throw Error("r_min must be below r_max");
  if (!(spec.r_min < 1.0 && 1.0 < spec.r_max)) throw Error("truncation must straddle r = 1");
  if (spec.mode_cutoff < 0) throw Error("negative mode cutoff");
  if (!std::isfinite(spec.lambda) || !std::isfinite(spec.epsilon)) throw Error("non-finite spectral parameter");
  return spec;
}

// ---- mesh ----

static std::vector<double> trapezoid(const std::vector<double>& x) {
  std::vector<double> w(x.size(), 0.0);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    double h = x[i + 1] - x[i];
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }
  return w;
}

RadialMesh RadialMesh::from_nodes(std::vector<double> nodes, Grading g) {
  if (nodes.size() < 16) throw Error("mesh needs at least 16 nodes");
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
    if (!(nodes[i + 1] > nodes[i])) throw Error("mesh nodes must increase");
  RadialMesh m;
  m.weights = trapezoid(nodes);
  m.nodes = std::move(nodes);
  m.grading = g;
  return m;
}

RadialMesh RadialMesh::graded(double r_min, double r_max, int n_target) {
  if (!(r_min > 0 && r_min < 1 && r_max > 1)) throw Error("graded mesh needs r_min < 1 < r_max");
  // spacings match at r = 1: log-step L/n_g equals uniform step (r_max-1)/n_u
  double L = std::log(1.0 / r_min);
  double span = r_max - 1.0;
  int intervals = std::max(n_target - 1, 15);
  int n_u = std::max(1, (int)std::lround(intervals * span / (L + span)));
  double span_int = std::round(span);
  if (std::abs(span - span_int) < 1e-12 && span_int >= 1) {
    int per_unit = std::max(1, (int)std::lround(n_u / span_int));
    n_u = per_unit * (int)span_int;
  }
  int n_g = std::max(8, intervals - n_u);
  std::vector<double> x;
  x.reserve(n_g + n_u + 1);
  for (int i = 0; i < n_g; ++i) x.push_back(r_min * std::exp(L * i / n_g));
  for (int i = 0; i <= n_u; ++i) x.push_back(1.0 + span * i / n_u);
  x.back() = r_max;
  return from_nodes(std::move(x), Grading::geometric);
}

RadialMesh RadialMesh::uniform(double r_min, double r_max, int n) {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = r_min + (r_max - r_min) * i / (n - 1);
  x.back() = r_max;
  return from_nodes(std::move(x), Grading::uniform);
}

RadialMesh RadialMesh::logarithmic(double r_min, double r_max, int n) {
  std::vector<double> x(n);
  double L = std::log(r_max / r_min);
  for (int i = 0; i < n; ++i) x[i] = r_min * std::exp(L * i / (n - 1));
  x.back() = r_max;
  return from_nodes(std::move(x), Grading::geometric);
}

RadialMesh RadialMesh::refined() const {
  // constant ratio with a neighbour, but not constant spacing
  auto geometric_interval = [&](std::size_t i) {
    auto same = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::abs(b); };
    for (std::size_t j : {i - 1, i + 1}) {
      if (j >= nodes.size() - 1) continue;
      if (same(nodes[j + 1] / nodes[j], nodes[i + 1] / nodes[i]) && !same(h(j), h(i))) return true;
    }
    return false;
  };
  std::vector<double> x;
  x.reserve(2 * nodes.size() - 1);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    x.push_back(nodes[i]);
    // geometric midpoint keeps the ratio constant where the grading is geometric
    double a = nodes[i], b = nodes[i + 1];
    bool geo = grading == Grading::geometric && (b <= 1.0 + 1e-12 || geometric_interval(i));
    x.push_back(geo ? std::sqrt(a * b) : 0.5 * (a + b));
  }
  x.push_back(nodes.back());
  return from_nodes(std::move(x), grading);
}

std::size_t RadialMesh::nearest(double r) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), r);
  if (it == nodes.end()) return nodes.size() - 1;
  std::size_t i = it - nodes.begin();
  if (i > 0 && std::abs(nodes[i - 1] - r) < std::abs(nodes[i] - r)) return i - 1;
  return i;
}

double RadialMesh::integrate(const std::vector<double>& f) const {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += weights[i] * f[i];
  return s;
}

MeshPtr make_mesh(RadialMesh m) { return std::make_shared<const RadialMesh>(std::move(m)); }

MeshPtr default_mesh(const ProblemSpec& spec, int n_target) {
  return make_mesh(RadialMesh::graded(spec.r_min, spec.r_max, n_target));
}

// ---- modes and fields ----

std::string ModeIndex::label() const {
  std::ostringstream os;
  if (d == 2) os << "m=" << index;
  else os << "l=" << index << ",m=" << azimuth;
  return os.str();
}

bool ModeIndex::operator<(const ModeIndex& o) const {
  if (d != o.d) return d < o.d;
  if (index != o.index) return index < o.index;
  return azimuth < o.azimuth;
}

ModeIndex free_mode(int d, int index, int azimuth) {
  ModeIndex m;
  m.d = d;
  m.index = index;
  m.azimuth = d == 3 ? azimuth : 0;
  if (d == 3) {
    m.nu_eff = index + 0.5;
    m.tangential = index * (index + 1.0);
  } else {
    m.nu_eff = std::abs((double)index);
    m.tangential = double(index) * index;
  }
  return m;
}

RadialField::RadialField(MeshPtr m, std::vector<cplx> v, ModeIndex mi, bool red)
    : mesh(std::move(m)), values(std::move(v)), mode(mi), reduced(red) {
  if (!mesh) throw Error("field without mesh");
  if (values.size() != mesh->size()) throw Error("field length differs from mesh");
  for (const auto& x : values)
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) throw Error("non-finite field sample");
}

RadialField RadialField::to_reduced() const {
  if (reduced) return *this;
  RadialField out = *this;
  double c = half_dim(mode.d);
  for (std::size_t i = 0; i < values.size(); ++i) out.values[i] *= std::pow(mesh->nodes[i], c);
  out.reduced = true;
  return out;
}

RadialField RadialField::to_plain() const {
  if (!reduced) return *this;
  RadialField out = *this;
  double c = half_dim(mode.d);
  for (std::size_t i = 0; i < values.size(); ++i) out.values[i] *= std::pow(mesh->nodes[i], -c);
  out.reduced = false;
  return out;
}

EstimateReport make_report(std::string kind, double lhs, double rhs, const ProblemSpec& params,
                           std::string notes) {
  if (!(rhs >= 0.0)) throw Error("report '" + kind + "' has negative right side");
  if (!(lhs >= 0.0)) throw Error("report '" + kind + "' has negative left side");
  EstimateReport r;
  r.kind = std::move(kind);
  r.lhs = lhs;
  r.rhs = rhs;
  r.ratio = rhs > 0.0 ? lhs / rhs : (lhs == 0.0 ? 0.0 : INFINITY);
  r.params = params;
  r.notes = std::move(notes);
  return r;
}

}  // namespace maghelm
