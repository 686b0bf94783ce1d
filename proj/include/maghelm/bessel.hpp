#pragma once

#include "maghelm/model.hpp"

/// Cylinder functions of real order and complex argument.
/// J: power series for |z| <= 12. Y: Schlafli integral for |z| <= 12 (any real order).
/// |z| > 12: Hankel asymptotics when the order is small against |z|, integral forms otherwise.
/// Y, H1 need Re z > 0 (or z on the positive real axis).
namespace maghelm::bessel {

constexpr double kSeriesRadius = 12.0;

cplx J(double nu, cplx z);
cplx Y(double nu, cplx z);
cplx H1(double nu, cplx z);

struct ValueDeriv {
  cplx value;
  cplx deriv;  // d/dz
};

ValueDeriv J_with_deriv(double nu, cplx z);
ValueDeriv H1_with_deriv(double nu, cplx z);

/// d/dr log(sqrt(r) C_nu(k r)) for C = H1 (outgoing) or J (regular).
cplx log_deriv_sqrt_hankel(double nu, cplx k, double r);
cplx log_deriv_sqrt_regular(double nu, cplx k, double r);

}  // namespace maghelm::bessel
