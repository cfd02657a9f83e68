#pragma once

#include <array>
#include <string>
#include <variant>

namespace diraclab {

enum class CircleSpin { bounding, non_bounding };
enum class CycleSpin { periodic, antiperiodic };

/// Round circle of circumference `length`. The non-bounding spin structure
/// is the one whose Dirac spectrum contains zero.
struct Circle {
  double length = 1.0;
  CircleSpin spin = CircleSpin::non_bounding;
};

struct Sphere {
  double radius = 1.0;
};

/// Rectangular flat torus with independent spin boundary conditions on the
/// two generating cycles.
struct FlatTorus {
  double length1 = 1.0;
  double length2 = 1.0;
  std::array<CycleSpin, 2> spin{CycleSpin::antiperiodic, CycleSpin::antiperiodic};
};

/// Factors admissible as the base of a product with a circle. Keeping this a
/// separate variant enforces the single product level at the type level.
using ProductBase = std::variant<Circle, Sphere, FlatTorus>;

struct ProductWithCircle {
  ProductBase base;
  Circle circle;
};

/// A model spin manifold. Construct through the factory functions, which
/// validate the metric parameters.
class ModelManifold {
 public:
  using Variant = std::variant<Circle, Sphere, FlatTorus, ProductWithCircle>;

  static ModelManifold circle(double length, CircleSpin spin = CircleSpin::non_bounding);
  static ModelManifold sphere(double radius);
  static ModelManifold flat_torus(double length1, double length2,
                                  std::array<CycleSpin, 2> spin = {CycleSpin::antiperiodic,
                                                                   CycleSpin::antiperiodic});
  static ModelManifold product(const ModelManifold& base, const Circle& circle);

  const Variant& variant() const { return v_; }

  template <class T>
  bool is() const {
    return std::holds_alternative<T>(v_);
  }
  template <class T>
  const T& as() const {
    return std::get<T>(v_);
  }

  std::string name() const;

 private:
  explicit ModelManifold(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

int dimension(const ModelManifold& m);
double volume(const ModelManifold& m);
double scalar_curvature_min(const ModelManifold& m);
/// Genus of a model surface; throws DimensionError outside dimension 2.
int genus(const ModelManifold& m);

const char* to_string(CircleSpin s);
const char* to_string(CycleSpin s);

}  // namespace diraclab
