#include "maghelm/linalg.hpp"

#include <lapacke.h>

#include <cmath>
#include <numbers>

namespace maghelm::linalg {

GaussRule gauss_legendre(int n, double a, double b) {
  GaussRule g;
  g.x.resize(n);
  g.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) { p1 = x; p0 = 1.0; }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    g.x[i] = -x;
    g.x[n - 1 - i] = x;
    g.w[i] = g.w[n - 1 - i] = w;
  }
  double c = 0.5 * (b - a), m = 0.5 * (b + a);
  for (int i = 0; i < n; ++i) {
    g.x[i] = m + c * g.x[i];
    g.w[i] *= c;
  }
  return g;
}

std::vector<cplx> solve_tridiagonal(std::vector<cplx> sub, std::vector<cplx> diag, std::vector<cplx> sup,
                                    std::vector<cplx> rhs) {
  lapack_int n = (lapack_int)diag.size();
  lapack_int info = LAPACKE_zgtsv(LAPACK_COL_MAJOR, n, 1, reinterpret_cast<lapack_complex_double*>(sub.data()),
                                  reinterpret_cast<lapack_complex_double*>(diag.data()),
                                  reinterpret_cast<lapack_complex_double*>(sup.data()),
                                  reinterpret_cast<lapack_complex_double*>(rhs.data()), n);
  if (info != 0) throw Error("singular tridiagonal system");
  return rhs;
}

std::vector<double> solve_tridiagonal(std::vector<double> sub, std::vector<double> diag, std::vector<double> sup,
                                      std::vector<double> rhs) {
  lapack_int n = (lapack_int)diag.size();
  lapack_int info = LAPACKE_dgtsv(LAPACK_COL_MAJOR, n, 1, sub.data(), diag.data(), sup.data(), rhs.data(), n);
  if (info != 0) throw Error("singular tridiagonal system");
  return rhs;
}

TridiagEigen symmetric_tridiagonal_eigen(const std::vector<double>& diag, const std::vector<double>& off,
                                         int count) {
  lapack_int n = (lapack_int)diag.size();
  std::vector<double> d = diag, e = off;
  e.resize(n, 0.0);
  lapack_int m = 0;
  std::vector<double> w(n);
  std::vector<double> z((std::size_t)n * n);
  std::vector<lapack_int> isuppz(2 * n);
  char range = count < 0 || count >= n ? 'A' : 'I';
  lapack_int il = 1, iu = count < 0 ? n : std::min<lapack_int>(count, n);
  lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', range, n, d.data(), e.data(), 0.0, 0.0, il, iu, 0.0, &m,
                                   w.data(), z.data(), n, isuppz.data());
  if (info != 0) throw Error("tridiagonal eigensolver failed");
  TridiagEigen out;
  out.values.assign(w.begin(), w.begin() + m);
  out.vectors.resize(m);
  for (lapack_int j = 0; j < m; ++j) out.vectors[j].assign(z.begin() + (std::size_t)j * n, z.begin() + (std::size_t)(j + 1) * n);
  return out;
}

}  // namespace maghelm::linalg
