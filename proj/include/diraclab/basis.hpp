#pragma once

#include <complex>
#include <vector>

#include "diraclab/geometry.hpp"
#include "diraclab/half_integer.hpp"

namespace diraclab {

/// One spin-weighted spherical harmonic sY_{lm}.
struct SphereMode {
  HalfInt s;
  HalfInt l;
  HalfInt m;
  auto operator<=>(const SphereMode&) const = default;
};

/// Truncated spin-weighted harmonic basis on a round sphere. For every spin
/// weight s the modes are l = |s|, |s|+1, ... up to l_max and m = -l..l.
class SphereBasis {
 public:
  SphereBasis(HalfInt l_max, std::vector<HalfInt> spin_weights, double radius);

  /// Weights needed by the spinor bundle twisted by line bundles of the given
  /// degrees: (q-1)/2 and (q+1)/2 for each degree q.
  static SphereBasis for_degrees(HalfInt l_max, const std::vector<int>& degrees, double radius);

  HalfInt l_max() const { return l_max_; }
  double radius() const { return radius_; }
  const std::vector<HalfInt>& spin_weights() const { return weights_; }
  bool has_weight(HalfInt s) const;

  /// Modes of one weight, ordered by l then m.
  std::vector<SphereMode> modes(HalfInt s) const;
  /// Largest admissible l for weight s (same half-integer class as s).
  HalfInt top_l(HalfInt s) const;
  /// Sum over l of (2l + 1).
  int mode_count(HalfInt s) const;

 private:
  HalfInt l_max_;
  std::vector<HalfInt> weights_;
  double radius_;
};

enum class Ladder { raise, lower };

/// Global sign of the eth ladder convention.
inline constexpr int kEthSign = +1;

/// Ladder coefficient of eth (raise, s -> s+1) or eth-bar (lower, s -> s-1)
/// acting on sY_{lm} over a sphere of radius r:
///   raise:  sqrt((l-s)(l+s+1)) / r
///   lower: -sqrt((l+s)(l-s+1)) / r
/// Both vanish exactly at the bottom of the ladder.
double eth_coefficient(HalfInt s, HalfInt l, Ladder direction, double radius);

/// Wigner 3j symbol, evaluated exactly with the Racah sum over rationals and
/// rounded to double once at the end. Returns 0 whenever the selection rules
/// fail.
double wigner3j(HalfInt l1, HalfInt l2, HalfInt l3, HalfInt m1, HalfInt m2, HalfInt m3);

/// \int_{S^2} sY_a  sY_beta  sY_b  dOmega over the unit sphere, via
///   sqrt((2la+1)(2lb+1)(2lbeta+1)/4pi) (la lbeta lb; ma mbeta mb)(la lbeta lb; -sa -sbeta -sb).
/// Zero unless the m's and the weights each sum to zero.
std::complex<double> coupling_element(const SphereMode& a, const SphereMode& b, const SphereMode& beta);

/// <a | Y_beta | b> = \int conj(sY_a) Y_beta Y_b dOmega, using
/// conj(sY_{lm}) = (-1)^{m+s} (-s)Y_{l,-m}.
std::complex<double> matrix_element(const SphereMode& a, const SphereMode& beta, const SphereMode& b);

/// Fourier modes on a circle. The non-bounding structure has integer
/// frequencies, the bounding one is offset by 1/2.
struct CircleBasis {
  int k_max = 16;
  double length = 1.0;
  CircleSpin spin = CircleSpin::non_bounding;

  static CircleBasis for_circle(const Circle& c, int k_max);
  double offset() const { return spin == CircleSpin::bounding ? 0.5 : 0.0; }
};

/// A U(1) lattice gauge field of constant flux on a rectangular torus,
/// sites indexed by (x1, x2) with x1 fastest. link1/link2 hold the phases on
/// the forward links in directions 1 and 2.
struct TorusLattice {
  int n1 = 32;
  int n2 = 32;
  double wilson = 1.0;
  FlatTorus torus;
  int degree = 0;
  std::vector<std::complex<double>> link1;
  std::vector<std::complex<double>> link2;

  /// Landau-gauge field with flux 2 pi d / (n1 n2) through every plaquette.
  static TorusLattice build(const FlatTorus& torus, int degree, int n1, int n2, double wilson = 1.0);

  int site(int x1, int x2) const { return ((x1 % n1 + n1) % n1) + n1 * ((x2 % n2 + n2) % n2); }
  double spacing1() const { return torus.length1 / n1; }
  double spacing2() const { return torus.length2 / n2; }

  /// Flux through the plaquette with lower-left corner (x1, x2): minus the
  /// phase of the ordered link product, in [-pi, pi).
  double plaquette_angle(int x1, int x2) const;
  /// Sum of all plaquette angles; equals 2 pi d for a quantized field.
  double total_flux() const;
};

}  // namespace diraclab
