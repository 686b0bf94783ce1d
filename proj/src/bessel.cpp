#include "maghelm/bessel.hpp"

#include <cmath>
#include <numbers>

#include "maghelm/linalg.hpp"

namespace maghelm::bessel {

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

bool is_negative_integer(double nu) { return nu < 0 && std::abs(nu - std::round(nu)) < 1e-14; }

cplx series_J(double nu, cplx z) {
  if (is_negative_integer(nu)) {
    long n = std::lround(-nu);
    return (n % 2 ? -1.0 : 1.0) * series_J(-nu, z);
  }
  if (std::abs(z) == 0.0) return nu == 0.0 ? cplx(1.0) : cplx(0.0);
  cplx lead = std::exp(nu * std::log(0.5 * z)) / std::tgamma(nu + 1.0);
  cplx q = -0.25 * z * z;
  cplx term = 1.0, sum = 1.0;
  for (int m = 1; m < 500; ++m) {
    term *= q / (m * (m + nu));
    sum += term;
    if (m > std::abs(z) && std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return lead * sum;
}

// Hankel asymptotic sums; returns {H1, H2}.
std::pair<cplx, cplx> asymptotic_H(double nu, cplx z) {
  double mu = 4.0 * nu * nu;
  cplx sp = 1.0, sm = 1.0, tp = 1.0, tm = 1.0;
  double prev = 1.0;
  for (int k = 1; k < 200; ++k) {
    double c = (mu - (2.0 * k - 1) * (2.0 * k - 1)) / (8.0 * k);
    if (c == 0.0) break;
    cplx np = tp * (I * c / z), nm = tm * (-I * c / z);
    double mag = std::abs(np);
    if (mag > prev && k > nu) break;  // divergent tail
    tp = np;
    tm = nm;
    sp += tp;
    sm += tm;
    prev = mag;
    if (mag < 1e-17) break;
  }
  cplx pre = std::sqrt(2.0 / (pi * z));
  cplx w = z - 0.5 * nu * pi - 0.25 * pi;
  return {pre * std::exp(I * w) * sp, pre * std::exp(-I * w) * sm};
}

// integrals over [0,pi] and [0,inf) of the Schlafli representations
struct SchlafliParts {
  cplx J, Y;
};

SchlafliParts schlafli(double nu, cplx z) {
  if (!(z.real() > 0.0)) throw Error("Bessel evaluation out of validated range");
  // theta-part
  int panels = 1 + (int)((std::abs(z) + std::abs(nu)) / 6.0);
  static const linalg::GaussRule g24 = linalg::gauss_legendre(24, 0.0, 1.0);
  cplx ij = 0.0, iy = 0.0;
  double wpan = pi / panels;
  for (int p = 0; p < panels; ++p) {
    for (std::size_t q = 0; q < g24.x.size(); ++q) {
      double th = (p + g24.x[q]) * wpan;
      cplx arg = z * std::sin(th) - nu * th;
      ij += g24.w[q] * wpan * std::cos(arg);
      iy += g24.w[q] * wpan * std::sin(arg);
    }
  }
  // t-part, panels shrink where exp(-z sinh t) varies fast
  cplx tj = 0.0, ty = 0.0;
  double t = 0.0;
  double sn = std::sin(nu * pi), cn = std::cos(nu * pi);
  static const linalg::GaussRule g16 = linalg::gauss_legendre(16, 0.0, 1.0);
  for (int guard = 0; guard < 100000; ++guard) {
    double w = std::min(0.5, 3.0 / (std::abs(z) * std::cosh(t) + std::abs(nu) + 1.0));
    for (std::size_t q = 0; q < g16.x.size(); ++q) {
      double s = t + g16.x[q] * w;
      cplx e = std::exp(-z * std::sinh(s));
      double ep = std::exp(nu * s), em = std::exp(-nu * s);
      tj += g16.w[q] * w * e * em;
      ty += g16.w[q] * w * e * (ep + em * cn);
    }
    t += w;
    if (z.real() * std::sinh(t) - std::abs(nu) * t > 60.0) break;
  }
  return {(ij - sn * tj) / pi, (iy - ty) / pi};
}

// H1 = (2/(i pi)) e^{-i nu pi/2} int_0^inf exp(i z cosh t) cosh(nu t) dt, for Im z > 0.
// Avoids the cancellation in J + iY when Im z is large.
cplx hankel_cosh_integral(double nu, cplx z) {
  static const linalg::GaussRule g16 = linalg::gauss_legendre(16, 0.0, 1.0);
  cplx sum = 0.0;
  double t = 0.0;
  for (int guard = 0; guard < 100000; ++guard) {
    double w = std::min(0.25, 2.0 / (std::abs(z) * std::sinh(t) + std::abs(nu) + 1.0));
    for (std::size_t q = 0; q < g16.x.size(); ++q) {
      double s = t + g16.x[q] * w;
      sum += g16.w[q] * w * std::exp(I * z * std::cosh(s)) * std::cosh(nu * s);
    }
    t += w;
    if (z.imag() * std::cosh(t) - std::abs(nu) * t > 60.0 + z.imag()) break;
  }
  return 2.0 / (I * pi) * std::exp(-I * nu * pi / 2.0) * sum;
}

bool use_asymptotic(double nu, cplx z) {
  double a = std::abs(z);
  return a > kSeriesRadius && a > nu * nu;
}

}  // namespace

cplx J(double nu, cplx z) {
  if (std::abs(z) <= kSeriesRadius) return series_J(nu, z);
  if (use_asymptotic(std::abs(nu), z)) {
    auto h = asymptotic_H(std::abs(nu), z);
    cplx j = 0.5 * (h.first + h.second);
    if (nu < 0 && !is_negative_integer(nu)) {
      cplx y = (h.first - h.second) / (2.0 * I);
      return std::cos(nu * pi) * j + std::sin(nu * pi) * y;  // J_{-a} = cos(a pi) J_a - sin(a pi) Y_a
    }
    if (is_negative_integer(nu)) return (std::lround(-nu) % 2 ? -1.0 : 1.0) * j;
    return j;
  }
  return schlafli(nu, z).J;
}

cplx Y(double nu, cplx z) {
  if (use_asymptotic(std::abs(nu), z)) {
    auto h = asymptotic_H(std::abs(nu), z);
    cplx y = (h.first - h.second) / (2.0 * I);
    if (nu < 0) {
      cplx j = 0.5 * (h.first + h.second);
      double a = -nu;
      return std::sin(a * pi) * j + std::cos(a * pi) * y;  // Y_{-a} = sin(a pi) J_a + cos(a pi) Y_a
    }
    return y;
  }
  return schlafli(nu, z).Y;
}

cplx H1(double nu, cplx z) {
  if (use_asymptotic(std::abs(nu), z) && nu >= 0) return asymptotic_H(nu, z).first;
  if (z.imag() > 2.0) return hankel_cosh_integral(nu, z);
  return J(nu, z) + I * Y(nu, z);
}

ValueDeriv J_with_deriv(double nu, cplx z) {
  cplx v = J(nu, z);
  cplx vm = J(nu - 1.0, z);
  return {v, vm - nu / z * v};
}

ValueDeriv H1_with_deriv(double nu, cplx z) {
  cplx v = H1(nu, z);
  cplx vm;
  if (use_asymptotic(std::abs(nu - 1.0), z) && nu - 1.0 < 0) {
    // H1_{-a} = e^{i a pi} H1_a
    double a = 1.0 - nu;
    vm = std::exp(I * a * pi) * asymptotic_H(a, z).first;
  } else {
    vm = H1(nu - 1.0, z);
  }
  return {v, vm - nu / z * v};
}

cplx log_deriv_sqrt_hankel(double nu, cplx k, double r) {
  auto h = H1_with_deriv(nu, k * r);
  return 0.5 / r + k * h.deriv / h.value;
}

cplx log_deriv_sqrt_regular(double nu, cplx k, double r) {
  auto j = J_with_deriv(nu, k * r);
  return 0.5 / r + k * j.deriv / j.value;
}

}  // namespace maghelm::bessel
