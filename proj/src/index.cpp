#include "diraclab/index.hpp"

#include "diraclab/errors.hpp"

namespace diraclab {

int topological_index(const BundleSpec& bundle) {
  if (dimension(bundle.base()) != 2) throw DimensionError("the index formula is evaluated on surfaces");
  return kIndexSign * bundle.total_degree();
}

int topological_index(const ConnectionSpec& conn) {
  const int from_curvature = degree_from_curvature(conn);
  if (from_curvature != conn.bundle().total_degree()) {
    throw DegreeMismatchError("bundle degree " + std::to_string(conn.bundle().total_degree()) +
                              " but the curvature integrates to " + std::to_string(from_curvature));
  }
  return topological_index(conn.bundle());
}

int analytic_index(const SpectrumResult& spec) {
  const auto [plus, minus] = zero_mode_count(spec);
  return plus - minus;
}

IndexReport index_check(const BundleSpec& bundle, const SpectrumResult& spec) {
  IndexReport r;
  r.degree_used = bundle.total_degree();
  r.topological_index = topological_index(bundle);
  const auto [plus, minus] = zero_mode_count(spec);
  r.analytic_index = plus - minus;
  r.kernel_dimension = plus + minus;
  r.match = r.topological_index == r.analytic_index;
  return r;
}

int calibrate_index_sign(HalfInt l_max) {
  const auto sphere = ModelManifold::sphere(1.0);
  const auto conn = ConnectionSpec::constant_curvature(sphere, {+1});
  const auto op = assemble_sphere(conn, SphereBasis::for_degrees(l_max, {+1}, 1.0));
  return analytic_index(eigen_smallest(op, 3, 1e-8));
}

}  // namespace diraclab
