#pragma once

#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "diraclab/geometry.hpp"
#include "diraclab/quadrature.hpp"

namespace diraclab {

/// A Hermitian bundle over a model manifold, split into line-bundle summands.
/// Degrees are meaningful only over surfaces; elsewhere every summand must
/// be the trivial line bundle.
class BundleSpec {
 public:
  BundleSpec(ModelManifold base, std::vector<int> summand_degrees);

  const ModelManifold& base() const { return base_; }
  const std::vector<int>& summand_degrees() const { return degrees_; }
  int rank() const { return static_cast<int>(degrees_.size()); }
  int total_degree() const;

 private:
  ModelManifold base_;
  std::vector<int> degrees_;
};

/// Direct sum of constant-curvature (Hermitian-Einstein) line connections,
/// one per listed degree.
struct ConstantCurvature {
  std::vector<int> degrees;
};

/// The product connection d in a global frame of the trivial bundle C^rank.
struct TrivialFrame {
  int rank = 1;
};

/// The affine family on H + H^{-1} = C^2 over a round sphere, running from
/// the trivial connection at t = 0 to the split monopole connection at t = 1.
struct Interpolated {
  double t = 0.0;
};

class ConnectionSpec {
 public:
  using Variant = std::variant<ConstantCurvature, TrivialFrame, Interpolated>;

  /// Constant-curvature connection on the bundle whose summands carry
  /// exactly these degrees.
  static ConnectionSpec constant_curvature(const ModelManifold& base, std::vector<int> degrees);
  /// Constant-curvature connection whose curvature degrees are given
  /// independently of the declared bundle topology. Used to exercise the
  /// degree cross-checks; the ranks must match.
  static ConnectionSpec constant_curvature_on(const BundleSpec& bundle, std::vector<int> degrees);
  static ConnectionSpec trivial_frame(const ModelManifold& base, int rank);

  const Variant& variant() const { return v_; }
  const BundleSpec& bundle() const { return bundle_; }
  const ModelManifold& base() const { return bundle_.base(); }

  template <class T>
  bool is() const {
    return std::holds_alternative<T>(v_);
  }
  template <class T>
  const T& as() const {
    return std::get<T>(v_);
  }

  std::string describe() const;

 private:
  ConnectionSpec(Variant v, BundleSpec b) : v_(std::move(v)), bundle_(std::move(b)) {}
  friend ConnectionSpec stabilized_family(double t, const ModelManifold& sphere);

  Variant v_;
  BundleSpec bundle_;
};

/// Hermitian-Einstein constant c in  omega -| F_A = -i c Id, normalised so
/// that deg = (i / 2 pi) \int tr F_A.
double he_constant(int degree, int rank, double volume);

/// Pointwise curvature of `conn` as the coefficient matrix of the area form:
/// F_A = curvature_density(...) * dA. The result is anti-Hermitian.
Eigen::MatrixXcd curvature_density(const ConnectionSpec& conn, const QuadraturePoint& p);

/// Norm of the second fundamental form of the tautological line inside C^2
/// over a round sphere, evaluated at polar angle theta from its
/// stereographic expression. It is constant, equal to 1/(sqrt(2) r).
double tautological_second_fundamental_form(double radius, double theta);

/// Result of integrating (i / 2 pi) tr F over the base.
struct DegreeIntegral {
  int degree;
  double raw;
  double residual;
};

DegreeIntegral integrate_degree(const ConnectionSpec& conn, int quadrature_order = 16);

/// Rounded curvature integral; throws QuantizationError when the raw value is
/// not within 1e-6 of an integer.
int degree_from_curvature(const ConnectionSpec& conn);

/// Interpolated(t) on H + H^{-1} over the given sphere.
ConnectionSpec stabilized_family(double t, const ModelManifold& sphere);

}  // namespace diraclab
