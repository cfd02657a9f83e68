#include "diraclab/flow.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <random>
#include <sstream>
#include <thread>

#include "diraclab/errors.hpp"

namespace diraclab {

std::vector<double> default_flow_grid(int levels) {
  if (levels < 1) throw DomainError("flow grid needs at least one refinement level");
  std::vector<double> grid{0.0};
  for (int k = 1; k <= levels; ++k) grid.push_back(1.0 - std::ldexp(1.0, -k));
  grid.push_back(1.0);
  return grid;
}

double perturbation_norm(const OperatorMatrix& a0, const OperatorMatrix& a1) {
  if (a0.dimension() != a1.dimension()) {
    throw DimensionMismatchError("family endpoints have dimensions " + std::to_string(a0.dimension()) + " and " +
                                 std::to_string(a1.dimension()));
  }
  const SparseMatrixC diff = a1.matrix - a0.matrix;
  const Eigen::Index n = diff.rows();
  if (n == 0) return 0.0;
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = {gauss(rng), gauss(rng)};
  v.normalize();
  double previous = 0.0;
  for (int it = 0; it < 10000; ++it) {
    const Eigen::VectorXcd w = diff * v;
    const Eigen::VectorXcd u = diff.adjoint() * w;
    const double estimate = std::sqrt(w.squaredNorm());
    const double un = u.norm();
    if (un == 0.0) return 0.0;
    v = u / un;
    if (it > 0 && std::abs(estimate - previous) <= 1e-6 * estimate) {
      return std::sqrt((diff * v).squaredNorm());
    }
    previous = estimate;
  }
  throw ConvergenceError("power iteration for the perturbation norm did not settle", 10000, previous);
}

bool continuity_certificate(const FlowResult& flow) {
  for (std::size_t i = 0; i + 1 < flow.t_grid.size(); ++i) {
    const double dt = std::abs(flow.t_grid[i + 1] - flow.t_grid[i]);
    const auto& a = flow.magnitudes[i];
    const auto& b = flow.magnitudes[i + 1];
    const std::size_t k = std::min(a.size(), b.size());
    for (std::size_t j = 0; j < k; ++j) {
      if (std::abs(a[j] - b[j]) > flow.perturbation_norm * dt + 2.0 * flow.atol) return false;
    }
  }
  return true;
}

std::optional<double> locate_small_eigenvalue(const FlowResult& flow, double eps) {
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  for (std::size_t i = 0; i < flow.t_grid.size(); ++i) {
    const double l = flow.lambda_min[i];
    if (l > flow.zero_threshold && l < eps) return flow.t_grid[i];
  }
  return std::nullopt;
}

FlowResult sweep_family(const ModelManifold& sphere, const SphereBasis& basis, const std::vector<double>& t_grid,
                        int k, double eps, const FlowOptions& options) {
  if (k < 4) throw DomainError("flow tracks at least 4 eigenvalues");
  if (t_grid.size() < 2 || t_grid.front() != 0.0 || t_grid.back() != 1.0) {
    throw DomainError("flow grid must start at 0 and end at 1");
  }
  for (std::size_t i = 0; i + 1 < t_grid.size(); ++i) {
    if (!(t_grid[i] < t_grid[i + 1])) throw DomainError("flow grid must be strictly increasing");
  }

  const auto ends = assemble_family_endpoints(sphere, basis);
  const std::size_t n = t_grid.size();
  std::vector<SpectrumResult> spectra(n);
  std::vector<std::exception_ptr> failures(n);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        const auto op = interpolate_family(ends, t_grid[i]);
        spectra[i] = eigen_smallest(op, k, options.zero_threshold);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(options.threads, static_cast<int>(n)));
  std::vector<std::thread> pool;
  for (int w = 1; w < threads; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  for (std::size_t i = 0; i < n; ++i) {
    if (!failures[i]) continue;
    try {
      std::rethrow_exception(failures[i]);
    } catch (const ConvergenceError& e) {
      std::ostringstream os;
      os << "at t = " << t_grid[i] << ": " << e.what();
      throw ConvergenceError(os.str(), e.iterations(), e.max_residual());
    }
  }

  FlowResult out;
  out.t_grid = t_grid;
  out.zero_threshold = options.zero_threshold;
  out.atol = options.atol;
  out.eps = eps;
  out.perturbation_norm = perturbation_norm(ends.a0, ends.a1);
  for (const auto& s : spectra) {
    auto m = magnitudes(s);
    std::sort(m.begin(), m.end());
    out.lambda_min.push_back(m.front());
    out.magnitudes.push_back(std::move(m));
  }
  const auto [plus, minus] = zero_mode_count(spectra.back());
  out.kernel_dimension_at_one = plus + minus;
  out.first_nonzero_at_one = first_nonzero(spectra.back());
  out.lipschitz_ok = continuity_certificate(out);
  out.t_epsilon = locate_small_eigenvalue(out, eps);
  return out;
}

}  // namespace diraclab
