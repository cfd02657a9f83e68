#pragma once

#include <optional>
#include <string>
#include <vector>

#include "diraclab/bundle.hpp"
#include "diraclab/spectrum.hpp"

namespace diraclab {

/// Friedrich: lambda^2 >= n R0 / (4 (n - 1)). DomainError for n < 2.
double friedrich_bound(int n, double R0);

enum class KirchbergParity { from_k, odd, even };

/// Kirchberg on a Kaehler spin manifold of complex dimension k:
/// (k + 1) R0 / (4k) for odd k, k R0 / (4 (k - 1)) for even k. A declared
/// parity must agree with k.
double kirchberg_bound(int k, double R0, KirchbergParity parity = KirchbergParity::from_k);

/// Complex Dirac operator twisted by an HE bundle of negative degree:
/// lambda^2 >= -4 pi deg / (rk vol). ApplicabilityError for deg >= 0.
double he_complex_bound(int deg, int rk, double vol);

/// deg L = deg E - rk (1 - g): the twist of the complex Dirac operator that
/// reproduces the real Dirac operator twisted by E.
int translate_twist(int deg_E, int rk, int g);

/// Real twisted Dirac operator: 4 pi (1 - g) / vol - 4 pi deg / (rk vol).
/// Meaningful only when deg < rk (1 - g); evaluated regardless.
double he_real_bound(int deg, int rk, double vol, int g);
bool he_real_significant(int deg, int rk, int g);

/// he_real_bound rewritten with Gauss-Bonnet: (R0 / 2)(1 - deg / ((1 - g) rk))
/// for g != 1, -4 pi deg / (rk vol) for g = 1. DomainError when g != 1 and
/// R0 vol is not 8 pi (1 - g).
double gauss_bonnet_form(double R0, int deg, int rk, int g, double vol);

struct BoundInputs {
  std::optional<double> R0;
  std::optional<int> n;
  std::optional<int> k;
  std::optional<int> deg;
  std::optional<int> rk;
  std::optional<double> vol;
  std::optional<int> g;
};

struct BoundReport {
  std::string bound_name;
  double bound_value = 0.0;
  double observed_min_lambda_sq = 0.0;
  double atol = 0.0;
  bool satisfied = false;
  bool attained = false;
  bool applicable = true;
  std::string applicability;
  BoundInputs inputs;
};

/// Compares first_nonzero(spec)^2 with bound_value.
BoundReport bound_verdict(const SpectrumResult& spec, double bound_value, double atol);

/// Every bound that applies to `conn` on its surface base, evaluated against
/// `spec`. Attainment tolerance is `atol` when `relative` is false and
/// atol * bound otherwise.
std::vector<BoundReport> surface_bounds(const ConnectionSpec& conn, const SpectrumResult& spec, double atol,
                                        bool relative);

}  // namespace diraclab
