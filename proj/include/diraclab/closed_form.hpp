#pragma once

#include <vector>

#include "diraclab/bundle.hpp"

namespace diraclab {

/// Continuum Dirac spectrum on a flat torus twisted by a constant-curvature
/// line bundle of degree d != 0: |d| zero modes and +/- sqrt(4 pi |d| k / V)
/// with multiplicity |d| for k = 1..levels. Sorted by magnitude.
std::vector<double> landau_spectrum(const FlatTorus& torus, int degree, int levels);

/// Continuum spectrum of the untwisted Dirac operator on a flat torus,
/// +/- |omega| over all frequency pairs with |k_i| <= k_max, sorted by
/// magnitude.
std::vector<double> free_torus_spectrum(const FlatTorus& torus, int k_max);

/// Smallest nonzero continuum eigenvalue magnitude for a torus connection
/// handled by the lattice backend.
double predicted_first_nonzero(const ConnectionSpec& conn);

}  // namespace diraclab
