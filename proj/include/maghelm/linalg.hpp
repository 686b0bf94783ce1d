#pragma once

#include <vector>

#include "maghelm/model.hpp"

namespace maghelm::linalg {

struct GaussRule {
  std::vector<double> x, w;
};

/// n-point Gauss-Legendre rule on [a, b].
GaussRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Complex tridiagonal system (sub, diag, super) solved in place with partial pivoting.
/// Throws Error("singular tridiagonal system") on a zero pivot.
std::vector<cplx> solve_tridiagonal(std::vector<cplx> sub, std::vector<cplx> diag, std::vector<cplx> sup,
                                    std::vector<cplx> rhs);

/// Real symmetric tridiagonal Cholesky-free solver (pivoted), used for inverse iteration.
std::vector<double> solve_tridiagonal(std::vector<double> sub, std::vector<double> diag,
                                      std::vector<double> sup, std::vector<double> rhs);

struct TridiagEigen {
  std::vector<double> values;                // ascending
  std::vector<std::vector<double>> vectors;  // orthonormal, one per value
};

/// Eigenpairs of a real symmetric tridiagonal matrix; count < 0 means all.
TridiagEigen symmetric_tridiagonal_eigen(const std::vector<double>& diag, const std::vector<double>& off,
                                         int count = -1);

}  // namespace maghelm::linalg
