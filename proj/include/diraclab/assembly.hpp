#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "diraclab/basis.hpp"
#include "diraclab/bundle.hpp"

namespace diraclab {

using SparseMatrixC = Eigen::SparseMatrix<std::complex<double>>;

enum class Backend { sphere_spectral, sphere_complex, torus_lattice, circle_fourier };

const char* to_string(Backend b);

/// Finite Hermitian approximation of a twisted Dirac operator.
struct OperatorMatrix {
  SparseMatrixC matrix;
  /// Diagonal chirality grading with entries +1 / -1; absent for odd
  /// dimensional bases.
  std::optional<Eigen::VectorXd> grading;
  Backend backend = Backend::sphere_spectral;
  std::string truncation;
  std::string provenance;
  /// How many times the backend repeats each continuum eigenvalue. The
  /// lattice backend diagonalizes the Hermitization of the Wilson operator,
  /// which doubles every singular value.
  int hermitization_multiplicity = 1;

  Eigen::Index dimension() const { return matrix.rows(); }
  Eigen::Index plus_dimension() const;
  Eigen::Index minus_dimension() const;
};

/// max |M - M^*| over all entries.
double hermiticity_defect(const OperatorMatrix& op);
/// max |Gamma M + M Gamma|; zero for ungraded operators.
double chirality_defect(const OperatorMatrix& op);

/// One spinor-bundle component in a sphere assembly: the sections of
/// S^{+/-} (x) (summand) expanded in harmonics of a single spin weight.
struct SphereComponent {
  int summand;
  int chirality;
  HalfInt weight;
  Eigen::Index offset;
  std::vector<SphereMode> modes;
};

/// Row layout shared by every sphere operator built from `conn` in `basis`.
/// Throws TruncationError if the basis lacks a required spin weight.
std::vector<SphereComponent> sphere_layout(const ConnectionSpec& conn, const SphereBasis& basis);

/// Twisted Dirac operator on a round sphere in the spin-weighted basis.
/// Constant-curvature and trivial-frame twists are block diagonal over
/// (l, m); Interpolated(t) is formed affinely from its two endpoints.
OperatorMatrix assemble_sphere(const ConnectionSpec& conn, const SphereBasis& basis);

/// The two endpoint matrices A_0 (trivial connection) and A_1 (split
/// monopole connection) of the stabilized family, in a common layout.
struct FamilyEndpoints {
  OperatorMatrix a0;
  OperatorMatrix a1;
};
FamilyEndpoints assemble_family_endpoints(const ModelManifold& sphere, const SphereBasis& basis);

/// A_0 + t (A_1 - A_0).
OperatorMatrix interpolate_family(const FamilyEndpoints& ends, double t);

/// Complex Dirac operator sqrt(2)(dbar + dbar^*) on the bundle L + L (x) K^{-1}
/// for a line bundle L of degree `degree_l` over a round sphere.
OperatorMatrix assemble_sphere_complex(int degree_l, const SphereBasis& basis);

/// Spinor connection Laplacian in the same basis as assemble_sphere
/// (constant-curvature and trivial-frame twists).
OperatorMatrix assemble_sphere_spinor_laplacian(const ConnectionSpec& conn, const SphereBasis& basis);

/// Wilson lattice Dirac operator D_W on a flat torus, returned in its
/// Hermitian form [[0, D_W^*], [D_W, 0]]. Throws FluxError if the link
/// field of `lattice` is not a quantized constant-flux field matching the
/// connection's degree.
OperatorMatrix assemble_torus_lattice(const ConnectionSpec& conn, const TorusLattice& lattice);

/// The bare (non-Hermitian) Wilson operator for one U(1) summand.
SparseMatrixC wilson_dirac(const TorusLattice& lattice);

/// Diagonal Dirac operator on a circle, eigenvalues 2 pi (k + delta) / L.
OperatorMatrix assemble_circle(const CircleBasis& basis);

}  // namespace diraclab
