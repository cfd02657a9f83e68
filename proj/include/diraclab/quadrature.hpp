#pragma once

#include <vector>

#include "diraclab/geometry.hpp"

namespace diraclab {

/// A sample point of a surface quadrature rule. `u`, `v` are the chart
/// coordinates (polar angle and azimuth on the sphere, x and y on the
/// torus); `weight` already includes the Riemannian area element.
struct QuadraturePoint {
  double u;
  double v;
  double weight;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Product rule on a model surface: Gauss-Legendre in cos(theta) times the
/// trapezoid rule in azimuth for spheres, the midpoint rule for flat tori.
/// Exact for polynomial integrands of degree < 2n in cos(theta) and
/// trigonometric polynomials of degree < 2n in azimuth.
std::vector<QuadraturePoint> surface_quadrature(const ModelManifold& surface, int n);

}  // namespace diraclab
