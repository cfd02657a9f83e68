#include "diraclab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "diraclab/errors.hpp"

namespace diraclab {

using cd = std::complex<double>;

namespace {

double inf_norm(const SparseMatrixC& m) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(m.rows());
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrixC::InnerIterator it(m, k); it; ++it) rows(it.row()) += std::abs(it.value());
  }
  return m.rows() ? rows.maxCoeff() : 0.0;
}

bool magnitude_less(double a, double b) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  if (std::abs(std::abs(a) - std::abs(b)) > 1e-9 * scale) return std::abs(a) < std::abs(b);
  return a < b;
}

// Order of eigenpairs by magnitude. Within a group of near-equal magnitudes
// the signs alternate, negative first, so that truncating a symmetric
// spectrum keeps it balanced.
std::vector<Eigen::Index> magnitude_order(const Eigen::VectorXd& values) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(values.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return std::abs(values(a)) < std::abs(values(b)); });
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i + 1;
    const double base = std::abs(values(idx[i]));
    while (j < idx.size() && std::abs(values(idx[j])) - base <= 1e-9 * std::max(1.0, base)) ++j;
    std::vector<Eigen::Index> neg, pos;
    for (std::size_t k = i; k < j; ++k) (values(idx[k]) < 0.0 ? neg : pos).push_back(idx[k]);
    std::stable_sort(neg.begin(), neg.end(), [&](Eigen::Index a, Eigen::Index b) { return values(a) < values(b); });
    std::stable_sort(pos.begin(), pos.end(), [&](Eigen::Index a, Eigen::Index b) { return values(a) < values(b); });
    std::size_t k = i;
    for (std::size_t p = 0; p < std::max(neg.size(), pos.size()); ++p) {
      if (p < neg.size()) idx[k++] = neg[p];
      if (p < pos.size()) idx[k++] = pos[p];
    }
    i = j;
  }
  return idx;
}

struct EigenPairs {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
  int iterations = 0;
};

bool is_diagonal(const SparseMatrixC& m) {
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrixC::InnerIterator it(m, k); it; ++it) {
      if (it.row() != it.col() && it.value() != cd(0.0)) return false;
    }
  }
  return true;
}

EigenPairs dense_pairs(const SparseMatrixC& m, int count) {
  if (is_diagonal(m)) {
    const Eigen::VectorXd d = Eigen::MatrixXcd(m).diagonal().real();
    const auto order = magnitude_order(d);
    EigenPairs out;
    out.values.resize(count);
    out.vectors = Eigen::MatrixXcd::Zero(m.rows(), count);
    for (int k = 0; k < count; ++k) {
      out.values(k) = d(order[static_cast<std::size_t>(k)]);
      out.vectors(order[static_cast<std::size_t>(k)], k) = 1.0;
    }
    return out;
  }
  const Eigen::MatrixXcd dense(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense);
  if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed", 0, 0.0);
  const auto order = magnitude_order(es.eigenvalues());
  EigenPairs out;
  out.values.resize(count);
  out.vectors.resize(m.rows(), count);
  for (int k = 0; k < count; ++k) {
    out.values(k) = es.eigenvalues()(order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = es.eigenvectors().col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

Eigen::VectorXd column_residuals(const SparseMatrixC& m, const Eigen::MatrixXcd& x, const Eigen::VectorXd& theta) {
  const Eigen::MatrixXcd r = m * x - x * theta.cast<cd>().asDiagonal();
  return r.colwise().norm().transpose();
}

// Block subspace iteration with (M^2 + tau^2)^{-1}, factored by sparse
// Cholesky. The squared operator is positive definite even when M has an
// exact kernel, and +/- pairs share a filter value so both members enter the
// subspace together. Ritz values are taken from M itself.
EigenPairs iterative_pairs(const SparseMatrixC& m, int count, double target, const SolverOptions& opt,
                           double norm, int& iterations, double& worst) {
  const Eigen::Index n = m.rows();
  const Eigen::Index block = std::min<Eigen::Index>(n, 2 * count + 20);
  const double tau = 1e-4 * std::max(norm, 1.0);

  SparseMatrixC squared = (m * m).pruned();
  SparseMatrixC eye(n, n);
  eye.setIdentity();
  squared += (tau * tau) * eye;
  squared.makeCompressed();
  Eigen::SimplicialLLT<SparseMatrixC, Eigen::Lower, Eigen::AMDOrdering<int>> llt(squared);
  if (llt.info() != Eigen::Success) throw ConvergenceError("sparse Cholesky factorization failed", 0, 0.0);

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXcd v(n, block);
  for (Eigen::Index j = 0; j < block; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) v(i, j) = cd(gauss(rng), gauss(rng));
  }

  // Rayleigh-Ritz on M^2 orders the subspace by |lambda| without the spurious
  // interior Ritz values M itself would produce. The leading vectors, widened
  // to whole clusters of M^2 so that +/- partners are never separated, are
  // then split into eigenvectors of M.
  EigenPairs out;
  worst = 0.0;
  for (iterations = 1; iterations <= opt.max_iterations; ++iterations) {
    Eigen::MatrixXcd w = llt.solve(v);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(w);
    v = qr.householderQ() * Eigen::MatrixXcd::Identity(n, block);

    Eigen::MatrixXcd mv = m * v;
    const Eigen::MatrixXcd g = mv.adjoint() * mv;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> sq(0.5 * (g + g.adjoint()));
    v = v * sq.eigenvectors();
    mv = mv * sq.eigenvectors();

    const Eigen::VectorXd& mu = sq.eigenvalues();
    Eigen::Index lead = count;
    while (lead < block && mu(lead) - mu(lead - 1) <= 1e-4 * std::max(mu(lead), tau * tau)) ++lead;
    const Eigen::MatrixXcd h = v.leftCols(lead).adjoint() * mv.leftCols(lead);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (h + h.adjoint()));
    const auto order = magnitude_order(es.eigenvalues());
    Eigen::MatrixXcd y(lead, count);
    Eigen::VectorXd theta(count);
    for (Eigen::Index k = 0; k < count; ++k) {
      y.col(k) = es.eigenvectors().col(order[static_cast<std::size_t>(k)]);
      theta(k) = es.eigenvalues()(order[static_cast<std::size_t>(k)]);
    }
    const Eigen::MatrixXcd x = v.leftCols(lead) * y;
    const Eigen::MatrixXcd r = mv.leftCols(lead) * y - x * theta.cast<cd>().asDiagonal();
    worst = r.colwise().norm().maxCoeff();
    if (worst <= target) {
      out.values = theta;
      out.vectors = x;
      out.iterations = iterations;
      return out;
    }
  }
  throw ConvergenceError("subspace iteration missed the residual target " + std::to_string(target),
                         opt.max_iterations, worst);
}

}  // namespace

const char* to_string(SolverMethod m) {
  switch (m) {
    case SolverMethod::automatic:
      return "automatic";
    case SolverMethod::dense:
      return "dense";
    case SolverMethod::iterative:
      return "iterative";
  }
  return "unknown";
}

SolverOptions default_solver_options(const OperatorMatrix& op) {
  SolverOptions o;
  if (op.backend == Backend::torus_lattice) {
    o.residual_tolerance = 1e-7;
    o.residual_absolute = true;
    o.cluster_gap_fraction = 0.1;
  }
  return o;
}

void sort_by_magnitude(std::vector<double>& values) {
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  const auto order = magnitude_order(v);
  for (std::size_t k = 0; k < order.size(); ++k) values[k] = v(order[k]);
}

std::vector<Cluster> cluster_values(const std::vector<double>& sorted, double tolerance) {
  // Cluster along the real line, then report in magnitude order.
  std::vector<double> line = sorted;
  std::sort(line.begin(), line.end());
  std::vector<Cluster> out;
  std::size_t i = 0;
  while (i < line.size()) {
    std::size_t j = i + 1;
    while (j < line.size() && line[j] - line[j - 1] <= tolerance) ++j;
    double sum = 0.0;
    for (std::size_t k = i; k < j; ++k) sum += line[k];
    out.push_back({sum / static_cast<double>(j - i), static_cast<int>(j - i)});
    i = j;
  }
  std::stable_sort(out.begin(), out.end(), [](const Cluster& a, const Cluster& b) {
    return magnitude_less(a.value, b.value);
  });
  return out;
}

namespace {

double gap_tolerance(const std::vector<double>& values, double fraction) {
  std::vector<double> line = values;
  std::sort(line.begin(), line.end());
  if (line.size() < 2) return 0.0;
  return fraction * (line.back() - line.front()) / static_cast<double>(line.size() - 1);
}

}  // namespace

SpectrumResult eigen_smallest(const OperatorMatrix& op, const SolverOptions& opt) {
  const Eigen::Index n = op.dimension();
  if (opt.count < 1 || opt.count > n) {
    throw DomainError("eigenvalue count " + std::to_string(opt.count) + " outside [1, " + std::to_string(n) + "]");
  }
  if (!(opt.zero_threshold > 0.0)) throw DomainError("zero threshold must be positive");

  const double norm = inf_norm(op.matrix);
  const double target = opt.residual_absolute ? opt.residual_tolerance
                                              : opt.residual_tolerance * std::max(norm, 1e-300);
  const bool dense = opt.method == SolverMethod::dense ||
                     (opt.method == SolverMethod::automatic && n <= opt.dense_limit);

  SpectrumResult out;
  out.diagnostics.matrix_norm = norm;
  out.diagnostics.residual_target = target;
  EigenPairs pairs;
  if (dense) {
    pairs = dense_pairs(op.matrix, opt.count);
    out.diagnostics.method = "dense";
    out.diagnostics.iterations = 1;
    out.diagnostics.max_residual = column_residuals(op.matrix, pairs.vectors, pairs.values).maxCoeff();
    if (out.diagnostics.max_residual > target) {
      throw ConvergenceError("dense eigenpairs miss the residual target", 1, out.diagnostics.max_residual);
    }
  } else {
    int iterations = 0;
    double worst = 0.0;
    pairs = iterative_pairs(op.matrix, opt.count, target, opt, norm, iterations, worst);
    out.diagnostics.method = "subspace_squared_inverse";
    out.diagnostics.iterations = iterations;
    out.diagnostics.max_residual = worst;
  }

  out.eigenvalues.assign(pairs.values.data(), pairs.values.data() + pairs.values.size());
  out.zero_threshold = opt.zero_threshold;
  out.cluster_tolerance = opt.cluster_gap_fraction > 0.0 ? gap_tolerance(out.eigenvalues, opt.cluster_gap_fraction)
                                                         : opt.cluster_tolerance;
  out.clusters = cluster_values(out.eigenvalues, out.cluster_tolerance);
  out.chirality.assign(out.eigenvalues.size(), 0);
  out.hermitization_multiplicity = op.hermitization_multiplicity;
  out.graded = op.grading.has_value();

  std::vector<Eigen::Index> kernel;
  for (Eigen::Index k = 0; k < pairs.values.size(); ++k) {
    if (std::abs(pairs.values(k)) <= opt.zero_threshold) kernel.push_back(k);
  }
  if (out.graded && !kernel.empty()) {
    Eigen::MatrixXcd kv(n, static_cast<Eigen::Index>(kernel.size()));
    for (std::size_t j = 0; j < kernel.size(); ++j) kv.col(static_cast<Eigen::Index>(j)) = pairs.vectors.col(kernel[j]);
    const Eigen::MatrixXcd g = kv.adjoint() * op.grading->cast<cd>().asDiagonal() * kv;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (g + g.adjoint()));
    // Descending, so the positive chirality labels come first.
    for (Eigen::Index j = es.eigenvalues().size() - 1; j >= 0; --j) {
      out.kernel_chirality.push_back(es.eigenvalues()(j));
    }
    for (std::size_t j = 0; j < kernel.size(); ++j) {
      const double c = out.kernel_chirality[j];
      out.chirality[static_cast<std::size_t>(kernel[j])] =
          std::abs(c) > kChiralityCutoff ? (c > 0 ? 1 : -1) : 0;
    }
  }
  return out;
}

SpectrumResult eigen_smallest(const OperatorMatrix& op, int count, double zero_threshold) {
  SolverOptions opt = default_solver_options(op);
  opt.count = count;
  opt.zero_threshold = zero_threshold;
  return eigen_smallest(op, opt);
}

SpectrumResult spectrum_from_values(std::vector<double> values, double zero_threshold, double cluster_tolerance) {
  sort_by_magnitude(values);
  SpectrumResult out;
  out.eigenvalues = std::move(values);
  out.zero_threshold = zero_threshold;
  out.cluster_tolerance = cluster_tolerance;
  out.clusters = cluster_values(out.eigenvalues, cluster_tolerance);
  out.chirality.assign(out.eigenvalues.size(), 0);
  out.diagnostics.method = "closed_form";
  return out;
}

double first_nonzero(const SpectrumResult& spec) {
  double best = -1.0;
  for (double v : spec.eigenvalues) {
    const double a = std::abs(v);
    if (a > spec.zero_threshold && (best < 0.0 || a < best)) best = a;
  }
  if (best < 0.0) {
    throw EmptySpectrumError("all " + std::to_string(spec.eigenvalues.size()) +
                             " computed eigenvalues lie below the zero threshold; increase count");
  }
  return best;
}

std::pair<int, int> zero_mode_count(const SpectrumResult& spec) {
  if (!spec.graded) throw DomainError("zero-mode chirality needs a graded operator");
  int plus = 0, minus = 0;
  for (double c : spec.kernel_chirality) {
    if (std::abs(c) <= kChiralityCutoff) {
      throw ChiralityAmbiguityError("kernel direction with chirality " + std::to_string(c) +
                                    " cannot be classified");
    }
    (c > 0 ? plus : minus) += 1;
  }
  return {plus, minus};
}

std::vector<double> magnitudes(const SpectrumResult& spec) {
  std::vector<double> out;
  out.reserve(spec.eigenvalues.size());
  for (double v : spec.eigenvalues) out.push_back(std::abs(v));
  return out;
}

SpectrumResult combine_product_spectrum(const SpectrumResult& base, const SpectrumResult& circle) {
  std::vector<double> values;
  values.reserve(base.eigenvalues.size() * circle.eigenvalues.size() * 2);
  for (std::size_t j = 0; j < base.eigenvalues.size(); ++j) {
    const double lambda = base.eigenvalues[j];
    for (double beta : circle.eigenvalues) {
      const double mag = std::hypot(lambda, beta);
      if (!base.graded) {
        values.push_back(-mag);
        values.push_back(mag);
      } else if (std::abs(lambda) > base.zero_threshold) {
        values.push_back(lambda > 0 ? mag : -mag);
      } else {
        // On a kernel mode of chirality c the pair block is c * beta.
        const int c = base.chirality.empty() ? 1 : (base.chirality[j] == 0 ? 1 : base.chirality[j]);
        values.push_back(c * beta);
      }
    }
  }
  auto out = spectrum_from_values(std::move(values), std::max(base.zero_threshold, circle.zero_threshold),
                                  std::max(base.cluster_tolerance, circle.cluster_tolerance));
  out.rank_multiplier = base.graded ? 1 : 2;
  out.diagnostics.method = "product";
  return out;
}

}  // namespace diraclab
