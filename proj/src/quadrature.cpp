#include "diraclab/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "diraclab/errors.hpp"

namespace diraclab {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw DomainError("Gauss-Legendre order must be positive");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      // p1 = P_n(x), p0 = P_{n-1}(x)
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

std::vector<QuadraturePoint> surface_quadrature(const ModelManifold& surface, int n) {
  if (n < 1) throw DomainError("quadrature order must be positive");
  std::vector<QuadraturePoint> pts;
  if (surface.is<Sphere>()) {
    const double r = surface.as<Sphere>().radius;
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    const int nphi = 2 * n;
    const double dphi = 2.0 * std::numbers::pi / nphi;
    pts.reserve(static_cast<std::size_t>(n) * nphi);
    for (int i = 0; i < n; ++i) {
      const double theta = std::acos(x[i]);
      for (int j = 0; j < nphi; ++j) {
        pts.push_back({theta, j * dphi, w[i] * dphi * r * r});
      }
    }
    return pts;
  }
  if (surface.is<FlatTorus>()) {
    const auto& t = surface.as<FlatTorus>();
    const double h1 = t.length1 / n, h2 = t.length2 / n;
    pts.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) pts.push_back({(i + 0.5) * h1, (j + 0.5) * h2, h1 * h2});
    }
    return pts;
  }
  throw DimensionError("surface quadrature requires a two-dimensional model manifold");
}

}  // namespace diraclab
