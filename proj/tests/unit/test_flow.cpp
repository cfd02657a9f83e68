#include <doctest.h>

#include <cmath>

#include "diraclab/errors.hpp"
#include "diraclab/flow.hpp"

using namespace diraclab;

namespace {

const ModelManifold kSphere = ModelManifold::sphere(1.0);

SphereBasis family_basis(int l_max_twice) { return SphereBasis::for_degrees(HalfInt{l_max_twice}, {+1, -1}, 1.0); }

double dense_norm(const SparseMatrixC& m) {
  const Eigen::MatrixXcd d(m);
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(d).singularValues()(0);
}

}  // namespace

TEST_CASE("default grid") {
  const auto g = default_flow_grid(3);
  CHECK(g == std::vector<double>{0.0, 0.5, 0.75, 0.875, 1.0});
  CHECK(default_flow_grid().size() == 10);
  CHECK_THROWS_AS(default_flow_grid(0), DomainError);
}

TEST_CASE("sweep on a coarse grid") {
  const auto f = sweep_family(kSphere, family_basis(21), {0, 0.25, 0.5, 0.75, 0.9, 1}, 6, 0.1);
  CHECK(f.lambda_min.front() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(f.lambda_min.back() <= 1e-8);
  CHECK(f.kernel_dimension_at_one == 2);
  CHECK(f.first_nonzero_at_one == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  CHECK(continuity_certificate(f));
  for (std::size_t i = 0; i + 1 < f.t_grid.size(); ++i) CHECK(f.lambda_min[i] > f.zero_threshold);
}

TEST_CASE("endpoint grid only") {
  const auto f = sweep_family(kSphere, family_basis(9), {0, 1}, 4, 0.1);
  CHECK(f.t_grid.size() == 2);
  CHECK(continuity_certificate(f));
  CHECK_FALSE(locate_small_eigenvalue(f, 0.1).has_value());
}

TEST_CASE("perturbation norm") {
  const auto ends = assemble_family_endpoints(kSphere, family_basis(9));
  CHECK(perturbation_norm(ends.a0, ends.a0) == 0.0);
  OperatorMatrix shifted = ends.a0;
  SparseMatrixC id(ends.a0.dimension(), ends.a0.dimension());
  id.setIdentity();
  shifted.matrix = ends.a0.matrix + id;
  CHECK(perturbation_norm(ends.a0, shifted) == doctest::Approx(1.0).epsilon(1e-9));

  const auto e21 = assemble_family_endpoints(kSphere, family_basis(21));
  const auto e25 = assemble_family_endpoints(kSphere, family_basis(25));
  const double n21 = perturbation_norm(e21.a0, e21.a1);
  const double n25 = perturbation_norm(e25.a0, e25.a1);
  CHECK(n21 > 0.0);
  CHECK(n21 == doctest::Approx(dense_norm(e21.a1.matrix - e21.a0.matrix)).epsilon(1e-5));
  CHECK(std::abs(n25 - n21) / n21 < 0.01);

  const auto small = assemble_family_endpoints(kSphere, family_basis(5));
  CHECK_THROWS_AS(perturbation_norm(small.a0, ends.a1), DimensionMismatchError);
}

TEST_CASE("default sweep properties") {
  const auto grid = default_flow_grid(8);
  const auto f = sweep_family(kSphere, family_basis(21), grid, 6, 0.1);
  CHECK(f.lambda_min[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(f.kernel_dimension_at_one == 2);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) CHECK(f.lambda_min[i] > f.zero_threshold);
  CHECK(continuity_certificate(f));

  // Weyl-Lipschitz on every pair, not only adjacent ones.
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = i + 1; j < grid.size(); ++j)
      for (std::size_t m = 0; m < f.magnitudes[i].size(); ++m)
        CHECK(std::abs(f.magnitudes[i][m] - f.magnitudes[j][m]) <=
              f.perturbation_norm * (grid[j] - grid[i]) + 2 * f.atol);

  const auto t_star = locate_small_eigenvalue(f, 0.1);
  REQUIRE(t_star.has_value());
  CHECK(*t_star < 1.0);
  const auto it = std::find(grid.begin(), grid.end(), *t_star);
  const double lam = f.lambda_min[static_cast<std::size_t>(it - grid.begin())];
  CHECK(lam > 0.0);
  CHECK(lam < 0.1);
  CHECK(f.t_epsilon == t_star);

  // One more refinement level reproduces the same crossing.
  const auto finer = sweep_family(kSphere, family_basis(21), default_flow_grid(9), 6, 0.1);
  CHECK(locate_small_eigenvalue(finer, 0.1) == t_star);

  CHECK(locate_small_eigenvalue(f, 2.0) == 0.0);
  CHECK_THROWS_AS(locate_small_eigenvalue(f, 0.0), DomainError);
}

TEST_CASE("tiny eps finds no strictly nonzero crossing") {
  const auto f = sweep_family(kSphere, family_basis(13), {0, 0.5, 1}, 4, 1e-12);
  CHECK_FALSE(locate_small_eigenvalue(f, 1e-12).has_value());
  CHECK_FALSE(f.t_epsilon.has_value());
}

TEST_CASE("certificate rejects a corrupted series") {
  auto f = sweep_family(kSphere, family_basis(9), {0, 0.5, 0.75, 1}, 4, 0.1);
  CHECK(continuity_certificate(f));
  f.magnitudes[1][0] = 10.0;
  CHECK_FALSE(continuity_certificate(f));
}

TEST_CASE("constant family has zero variation") {
  FlowResult f;
  f.t_grid = {0, 0.5, 1};
  f.magnitudes = {{1, 2}, {1, 2}, {1, 2}};
  f.lambda_min = {1, 1, 1};
  f.perturbation_norm = 0.0;
  f.atol = 0.0;
  CHECK(continuity_certificate(f));
}

TEST_CASE("truncation robustness of lambda_min") {
  const std::vector<double> grid{0, 0.5, 0.75, 0.9375, 1};
  const auto a = sweep_family(kSphere, family_basis(21), grid, 4, 0.1);
  const auto b = sweep_family(kSphere, family_basis(29), grid, 4, 0.1);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(a.lambda_min[i] - b.lambda_min[i]) < 1e-6);
}

TEST_CASE("threaded sweep is identical to the serial one") {
  const auto grid = default_flow_grid(4);
  FlowOptions serial, threaded;
  threaded.threads = 3;
  const auto a = sweep_family(kSphere, family_basis(13), grid, 5, 0.1, serial);
  const auto b = sweep_family(kSphere, family_basis(13), grid, 5, 0.1, threaded);
  CHECK(a.magnitudes == b.magnitudes);
  CHECK(a.lambda_min == b.lambda_min);
}

TEST_CASE("sweep preconditions") {
  CHECK_THROWS_AS(sweep_family(kSphere, family_basis(9), {0, 1}, 3, 0.1), DomainError);
  CHECK_THROWS_AS(sweep_family(kSphere, family_basis(9), {0.1, 1}, 4, 0.1), DomainError);
  CHECK_THROWS_AS(sweep_family(kSphere, family_basis(9), {0, 0.7, 0.5, 1}, 4, 0.1), DomainError);
}
