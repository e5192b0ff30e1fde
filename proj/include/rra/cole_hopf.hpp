#pragma once

#include <vector>

namespace rra {

/// Gauss-Hermite rule for integrals against exp(-z^2); weights sum to
/// sqrt(pi). Stable for orders up to a few hundred.
struct GaussHermite {
  std::vector<double> x;
  std::vector<double> w;
};

GaussHermite gauss_hermite(int order);

/// Viscous Burgers reference on (-1,1) x [0,1] with u(x,0) = -sin(pi x),
/// evaluated through the heat-kernel quotient of the Cole-Hopf
/// transform with Gauss-Hermite quadrature. Odd in x; |u| <= 1.
double burgers_cole_hopf(double x, double t, double nu, int quad_order = 160);

}  // namespace rra
