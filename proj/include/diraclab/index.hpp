#pragma once

#include "diraclab/bundle.hpp"
#include "diraclab/spectrum.hpp"

namespace diraclab {

/// Orientation sign sigma relating the curvature integral to the analytic
/// index on surfaces: ind D^+ = sigma * deg(E). Calibrated against the
/// degree +1 line bundle over the unit sphere, whose kernel lies in S^+.
inline constexpr int kIndexSign = +1;

struct IndexReport {
  int topological_index = 0;
  int analytic_index = 0;
  int degree_used = 0;
  int sign_convention = kIndexSign;
  int kernel_dimension = 0;
  bool match = false;
};

/// sigma * deg(E); on a surface only the degree-0 term of the A-hat genus
/// survives. Throws DimensionError off surfaces.
int topological_index(const BundleSpec& bundle);
/// As above, after checking that the curvature integral of `conn` reproduces
/// the bundle degree. Throws DegreeMismatchError otherwise.
int topological_index(const ConnectionSpec& conn);

/// n_plus - n_minus of the numerical kernel.
int analytic_index(const SpectrumResult& spec);

IndexReport index_check(const BundleSpec& bundle, const SpectrumResult& spec);

/// Recomputes sigma from scratch: the analytic index of the degree +1
/// sphere bundle at the given truncation.
int calibrate_index_sign(HalfInt l_max = HalfInt{5});

}  // namespace diraclab
