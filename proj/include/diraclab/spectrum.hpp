#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "diraclab/assembly.hpp"

namespace diraclab {

enum class SolverMethod { automatic, dense, iterative };

const char* to_string(SolverMethod m);

struct SolverOptions {
  int count = 12;
  double zero_threshold = 1e-8;
  /// Absolute clustering tolerance; ignored when cluster_gap_fraction > 0.
  double cluster_tolerance = 1e-7;
  /// When positive, the clustering tolerance is this fraction of the mean
  /// spacing between consecutive computed eigenvalues.
  double cluster_gap_fraction = 0.0;
  /// Residual target ||Mv - lambda v||; relative to ||M||_inf unless
  /// residual_absolute is set.
  double residual_tolerance = 1e-9;
  bool residual_absolute = false;
  SolverMethod method = SolverMethod::automatic;
  Eigen::Index dense_limit = 4000;
  int max_iterations = 400;
  std::uint64_t seed = 0x5eed5eedULL;
};

/// Backend defaults: 1e-8 zero threshold, 1e-7 clustering and residuals
/// relative to the norm for spectral backends; absolute residuals 1e-7 and
/// gap-relative clustering for the lattice. The lattice zero threshold has
/// no universal default and must be set from a closed-form prediction.
SolverOptions default_solver_options(const OperatorMatrix& op);

struct Cluster {
  double value;
  int multiplicity;
};

struct SolverDiagnostics {
  std::string method;
  int iterations = 0;
  double max_residual = 0.0;
  double residual_target = 0.0;
  double matrix_norm = 0.0;
};

struct SpectrumResult {
  /// Sorted by magnitude; within equal magnitudes the signs alternate,
  /// negative first.
  std::vector<double> eigenvalues;
  std::vector<Cluster> clusters;
  /// Chirality of each reported eigenvalue: +1/-1 for classified kernel
  /// modes, 0 for everything else.
  std::vector<int> chirality;
  /// Eigenvalues of Gamma restricted to the numerical kernel.
  std::vector<double> kernel_chirality;
  bool graded = false;
  double zero_threshold = 1e-8;
  double cluster_tolerance = 1e-7;
  int hermitization_multiplicity = 1;
  /// Spectrum entries produced per (base, circle) eigenvalue pair in a
  /// product spectrum; 1 for directly computed spectra.
  int rank_multiplier = 1;
  SolverDiagnostics diagnostics;
};

/// Threshold above which a kernel vector counts as chiral after rotation.
inline constexpr double kChiralityCutoff = 0.99;

/// The `count` smallest-magnitude eigenvalues of op. Throws
/// ConvergenceError when the residual target is missed.
SpectrumResult eigen_smallest(const OperatorMatrix& op, const SolverOptions& options);
SpectrumResult eigen_smallest(const OperatorMatrix& op, int count, double zero_threshold);

/// Builds clusters and chirality labels from an already sorted value list.
/// Used for spectra that are not produced by a solve.
SpectrumResult spectrum_from_values(std::vector<double> values, double zero_threshold,
                                    double cluster_tolerance);

/// Smallest |lambda| strictly above the zero threshold.
double first_nonzero(const SpectrumResult& spec);

/// (n_plus, n_minus) of the numerical kernel. Throws
/// ChiralityAmbiguityError if a kernel direction has |<v, Gamma v>| <= 0.99
/// after rotation, DomainError for ungraded spectra.
std::pair<int, int> zero_mode_count(const SpectrumResult& spec);

/// Magnitudes of the reported eigenvalues, in order.
std::vector<double> magnitudes(const SpectrumResult& spec);

/// Groups sorted values into clusters of nearby values.
std::vector<Cluster> cluster_values(const std::vector<double>& sorted, double tolerance);

/// Sorts by magnitude; values whose magnitudes agree to 1e-9 relative
/// alternate in sign, negative first.
void sort_by_magnitude(std::vector<double>& values);

/// Spectrum of the product of a base with a circle from the two factor
/// spectra: sign(lambda) sqrt(lambda^2 + beta^2) per pair when the base is
/// graded (kernel modes take the sign of their chirality), both signs per
/// pair when it is not.
SpectrumResult combine_product_spectrum(const SpectrumResult& base, const SpectrumResult& circle);

}  // namespace diraclab
