#include "maghelm/angular.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "maghelm/linalg.hpp"

namespace maghelm::angular {

namespace {

constexpr double pi = std::numbers::pi;
constexpr int kMonopoleBasis = 40;

bool separable_in_l(const PotentialSpec& s) {
  return s.kind != PotentialKind::monopole && s.kind != PotentialKind::aharonov_bohm;
}

double flux(const PotentialSpec& s) { return s.kind == PotentialKind::aharonov_bohm ? s.alpha : 0.0; }

// sector-m eigenproblem of the monopole angular operator in the normalized
// associated-Legendre basis l = |m| .. |m|+K-1
struct MonopoleSector {
  std::vector<double> values;
  std::vector<std::vector<double>> vectors;
};

const MonopoleSector& monopole_sector(double C, int m) {
  static std::mutex mu;
  static std::map<std::pair<double, int>, MonopoleSector> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(C, m);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  int am = std::abs(m), K = kMonopoleBasis;
  auto g = linalg::gauss_legendre(K + 8);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(K, K);
  std::vector<std::vector<double>> P(K, std::vector<double>(g.x.size()));
  for (int a = 0; a < K; ++a)
    for (std::size_t q = 0; q < g.x.size(); ++q) P[a][q] = std::sph_legendre(am + a, am, std::acos(g.x[q]));
  for (int a = 0; a < K; ++a) {
    for (int b = a; b < K; ++b) {
      double s = 0.0;
      for (std::size_t q = 0; q < g.x.size(); ++q) s += g.w[q] * P[a][q] * P[b][q] * (1.0 - g.x[q] * g.x[q]);
      H(a, b) = H(b, a) = 2.0 * pi * C * C * s;
    }
    double l = am + a;
    H(a, a) += l * (l + 1.0) + 2.0 * m * C;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  MonopoleSector sec;
  for (int n = 0; n < K; ++n) {
    sec.values.push_back(es.eigenvalues()(n));
    std::vector<double> v(K);
    int big = 0;
    for (int a = 0; a < K; ++a) {
      v[a] = es.eigenvectors()(a, n);
      if (std::abs(v[a]) > std::abs(v[big])) big = a;
    }
    if (v[big] < 0)
      for (auto& x : v) x = -x;
    sec.vectors.push_back(std::move(v));
  }
  return cache.emplace(key, std::move(sec)).first->second;
}

// sin^b(theta) C_n^{(b+1/2)}(cos theta), unit norm on the sphere with e^{i m phi}/sqrt(2 pi)
double ab_profile(int n, double b, double theta) {
  double a = b + 0.5, x = std::cos(theta);
  double c0 = 1.0, c1 = 2.0 * a * x, c = n == 0 ? c0 : c1;
  for (int k = 2; k <= n; ++k) {
    c = (2.0 * x * (k + a - 1.0) * c1 - (k + 2.0 * a - 2.0) * c0) / k;
    c0 = c1;
    c1 = c;
  }
  double lognorm = std::log(pi) + (1.0 - 2.0 * a) * std::log(2.0) + std::lgamma(n + 2.0 * a) - std::lgamma(n + 1.0) -
                   std::log(n + a) - 2.0 * std::lgamma(a);
  return std::pow(std::sin(theta), b) * c * std::exp(-0.5 * lognorm);
}

ModeIndex make(int d, int index, int azimuth, double tangential) {
  ModeIndex m;
  m.d = d;
  m.index = index;
  m.azimuth = azimuth;
  m.tangential = tangential;
  m.nu_eff = std::sqrt(std::max(0.0, tangential + 0.25 * (d - 2) * (d - 2)));
  return m;
}

}  // namespace

ModeIndex mode(const PotentialSpec& spec, int d, int index, int azimuth) {
  if (!spec.radial_compatible()) throw Error("non-radial custom potential");
  if (d == 2) {
    if (spec.kind == PotentialKind::monopole) throw Error("monopole requires d = 3");
    double s = index + flux(spec);
    return make(2, index, 0, s * s);
  }
  if (d != 3) throw Error("unsupported dimension");
  if (separable_in_l(spec)) {
    if (index < 0 || std::abs(azimuth) > index) throw Error("invalid harmonic labels");
    return make(3, index, azimuth, index * (index + 1.0));
  }
  if (index < 0) throw Error("invalid harmonic labels");
  if (spec.kind == PotentialKind::aharonov_bohm) {
    double mu = index + std::abs(azimuth + spec.alpha);
    return make(3, index, azimuth, mu * (mu + 1.0));
  }
  const auto& sec = monopole_sector(spec.C, azimuth);
  if (index >= (int)sec.values.size() / 2) throw Error("monopole mode beyond resolved basis");
  return make(3, index, azimuth, sec.values[index]);
}

std::vector<ModeIndex> modes(const PotentialSpec& spec, int d, int cutoff) {
  std::vector<ModeIndex> out;
  if (d == 2) {
    for (int m = -cutoff; m <= cutoff; ++m) out.push_back(mode(spec, 2, m, 0));
  } else if (separable_in_l(spec)) {
    for (int l = 0; l <= cutoff; ++l)
      for (int m = -l; m <= l; ++m) out.push_back(mode(spec, 3, l, m));
  } else {
    for (int m = -cutoff; m <= cutoff; ++m)
      for (int n = 0; n <= cutoff - std::abs(m); ++n) out.push_back(mode(spec, 3, n, m));
  }
  std::sort(out.begin(), out.end());
  return out;
}

cplx standard_harmonic(int d, int l, int m, double theta, double phi) {
  if (d == 2) return std::polar(1.0 / std::sqrt(2.0 * pi), l * phi);
  if (std::abs(m) > l) return 0.0;
  double sign = (m < 0 && (std::abs(m) % 2)) ? -1.0 : 1.0;
  return sign * std::sph_legendre(l, std::abs(m), theta) * std::polar(1.0, m * phi);
}

cplx value(const PotentialSpec& spec, const ModeIndex& md, double theta, double phi) {
  if (md.d == 2) return standard_harmonic(2, md.index, 0, theta, phi);
  if (separable_in_l(spec)) return standard_harmonic(3, md.index, md.azimuth, theta, phi);
  if (spec.kind == PotentialKind::aharonov_bohm) {
    double b = std::abs(md.azimuth + spec.alpha);
    return ab_profile(md.index, b, theta) / std::sqrt(2.0 * pi) * std::polar(1.0, md.azimuth * phi);
  }
  const auto& sec = monopole_sector(spec.C, md.azimuth);
  const auto& v = sec.vectors[md.index];
  cplx s = 0.0;
  int am = std::abs(md.azimuth);
  for (std::size_t a = 0; a < v.size(); ++a) s += v[a] * standard_harmonic(3, am + (int)a, md.azimuth, theta, phi);
  return s;
}

cplx overlap_with_harmonic(const PotentialSpec& spec, const ModeIndex& md, int l, int m) {
  if (md.d == 2) return md.index == l ? 1.0 : 0.0;
  if (separable_in_l(spec)) return (md.index == l && md.azimuth == m) ? 1.0 : 0.0;
  if (m != md.azimuth || l < std::abs(m)) return 0.0;
  if (spec.kind == PotentialKind::monopole) {
    const auto& v = monopole_sector(spec.C, m).vectors[md.index];
    std::size_t a = l - std::abs(m);
    return a < v.size() ? v[a] : 0.0;
  }
  // A-B: theta quadrature, phi part is orthonormal
  static const linalg::GaussRule g = linalg::gauss_legendre(256, 0.0, pi);
  double b = std::abs(md.azimuth + spec.alpha);
  double s = 0.0;
  double sign = (m < 0 && (std::abs(m) % 2)) ? -1.0 : 1.0;
  for (std::size_t q = 0; q < g.x.size(); ++q)
    s += g.w[q] * std::sin(g.x[q]) * ab_profile(md.index, b, g.x[q]) * sign *
         std::sph_legendre(l, std::abs(m), g.x[q]) * std::sqrt(2.0 * pi);
  return s;
}

}  // namespace maghelm::angular
