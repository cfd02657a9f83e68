#include "diraclab/geometry.hpp"

#include <cmath>
#include <numbers>

#include "diraclab/detail/overloaded.hpp"
#include "diraclab/errors.hpp"

namespace diraclab {

using detail::overloaded;

namespace {

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError(std::string(what) + " must be strictly positive");
  }
}

ModelManifold::Variant lift(const ProductBase& b) {
  return std::visit([](const auto& x) -> ModelManifold::Variant { return x; }, b);
}

}  // namespace

ModelManifold ModelManifold::circle(double length, CircleSpin spin) {
  require_positive(length, "circle length");
  return ModelManifold(Circle{length, spin});
}

ModelManifold ModelManifold::sphere(double radius) {
  require_positive(radius, "sphere radius");
  return ModelManifold(Sphere{radius});
}

ModelManifold ModelManifold::flat_torus(double length1, double length2,
                                        std::array<CycleSpin, 2> spin) {
  require_positive(length1, "torus side length");
  require_positive(length2, "torus side length");
  return ModelManifold(FlatTorus{length1, length2, spin});
}

ModelManifold ModelManifold::product(const ModelManifold& base, const Circle& circle) {
  require_positive(circle.length, "circle length");
  return std::visit(
      overloaded{
          [&](const ProductWithCircle&) -> ModelManifold {
            throw DomainError("product base must not itself be a product with a circle");
          },
          [&](const auto& b) -> ModelManifold {
            return ModelManifold(ProductWithCircle{ProductBase{b}, circle});
          },
      },
      base.variant());
}

std::string ModelManifold::name() const {
  return std::visit(overloaded{
                        [](const Circle&) { return std::string("circle"); },
                        [](const Sphere&) { return std::string("sphere"); },
                        [](const FlatTorus&) { return std::string("flat_torus"); },
                        [](const ProductWithCircle& p) {
                          return ModelManifold(lift(p.base)).name() + "_x_circle";
                        },
                    },
                    v_);
}

int dimension(const ModelManifold& m) {
  return std::visit(overloaded{
                        [](const Circle&) { return 1; },
                        [](const Sphere&) { return 2; },
                        [](const FlatTorus&) { return 2; },
                        [](const ProductWithCircle& p) {
                          return std::visit(
                                     overloaded{[](const Circle&) { return 1; },
                                                [](const auto&) { return 2; }},
                                     p.base) +
                                 1;
                        },
                    },
                    m.variant());
}

double volume(const ModelManifold& m) {
  using std::numbers::pi;
  const auto base_volume = [](const ProductBase& b) {
    return std::visit(overloaded{
                          [](const Circle& c) { return c.length; },
                          [](const Sphere& s) { return 4.0 * pi * s.radius * s.radius; },
                          [](const FlatTorus& t) { return t.length1 * t.length2; },
                      },
                      b);
  };
  return std::visit(overloaded{
                        [&](const ProductWithCircle& p) { return base_volume(p.base) * p.circle.length; },
                        [&](const auto& x) { return base_volume(ProductBase{x}); },
                    },
                    m.variant());
}

double scalar_curvature_min(const ModelManifold& m) {
  const auto base_r0 = [](const ProductBase& b) {
    return std::visit(overloaded{
                          [](const Sphere& s) { return 2.0 / (s.radius * s.radius); },
                          [](const auto&) { return 0.0; },
                      },
                      b);
  };
  return std::visit(overloaded{
                        [&](const ProductWithCircle& p) { return base_r0(p.base); },
                        [&](const auto& x) { return base_r0(ProductBase{x}); },
                    },
                    m.variant());
}

int genus(const ModelManifold& m) {
  if (m.is<Sphere>()) return 0;
  if (m.is<FlatTorus>()) return 1;
  throw DimensionError("genus is defined only for surfaces; got dimension " +
                       std::to_string(dimension(m)));
}

const char* to_string(CircleSpin s) {
  return s == CircleSpin::bounding ? "bounding" : "non_bounding";
}

const char* to_string(CycleSpin s) { return s == CycleSpin::periodic ? "periodic" : "antiperiodic"; }

}  // namespace diraclab
