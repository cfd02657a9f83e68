#pragma once

#include <optional>
#include <vector>

#include "diraclab/assembly.hpp"
#include "diraclab/spectrum.hpp"

namespace diraclab {

struct FlowOptions {
  double zero_threshold = 1e-8;
  /// Eigensolver accuracy allowance in the Weyl-Lipschitz check.
  double atol = 1e-8;
  int threads = 1;
};

struct FlowResult {
  std::vector<double> t_grid;
  /// k smallest eigenvalue magnitudes at each grid point.
  std::vector<std::vector<double>> magnitudes;
  std::vector<double> lambda_min;
  double perturbation_norm = 0.0;
  double zero_threshold = 1e-8;
  double atol = 1e-8;
  double eps = 0.0;
  bool lipschitz_ok = false;
  std::optional<double> t_epsilon;
  int kernel_dimension_at_one = 0;
  double first_nonzero_at_one = 0.0;
};

/// {0, 1/2, 3/4, ..., 1 - 2^-levels, 1}.
std::vector<double> default_flow_grid(int levels = 8);

/// Sweeps the stabilized family over `t_grid`. The grid must be sorted,
/// lie in [0, 1] and contain both endpoints; k >= 4.
FlowResult sweep_family(const ModelManifold& sphere, const SphereBasis& basis, const std::vector<double>& t_grid,
                        int k, double eps, const FlowOptions& options = {});

/// ||A_1 - A_0||_2 by power iteration on the Gram matrix with a fixed start
/// and relative tolerance 1e-6.
double perturbation_norm(const OperatorMatrix& a0, const OperatorMatrix& a1);

/// Weyl-Lipschitz check on every adjacent grid pair and every tracked
/// magnitude.
bool continuity_certificate(const FlowResult& flow);

/// Smallest grid t with zero_threshold < lambda_min(t) < eps.
std::optional<double> locate_small_eigenvalue(const FlowResult& flow, double eps);

}  // namespace diraclab
