#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "../oracles.hpp"
#include "diraclab/assembly.hpp"
#include "diraclab/errors.hpp"
#include "diraclab/spectrum.hpp"

using namespace diraclab;
constexpr double pi = std::numbers::pi;

namespace {

std::vector<double> sorted_by_magnitude(const Eigen::VectorXd& ev) {
  std::vector<double> v(ev.data(), ev.data() + ev.size());
  std::stable_sort(v.begin(), v.end(), [](double a, double b) {
    if (std::abs(std::abs(a) - std::abs(b)) > 1e-9) return std::abs(a) < std::abs(b);
    return a < b;
  });
  return v;
}

// Magnitude order with signs alternating -,+ inside each level, leftovers last.
std::vector<double> alternating_by_magnitude(const Eigen::VectorXd& ev) {
  const auto v = sorted_by_magnitude(ev);
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j < v.size() && std::abs(std::abs(v[j]) - std::abs(v[i])) <= 1e-9) ++j;
    std::vector<double> neg, pos;
    for (std::size_t k = i; k < j; ++k) (v[k] < 0 ? neg : pos).push_back(v[k]);
    if (std::abs(v[i]) <= 1e-9) {
      out.insert(out.end(), v.begin() + i, v.begin() + j);
    } else {
      for (std::size_t k = 0; k < std::max(neg.size(), pos.size()); ++k) {
        if (k < neg.size()) out.push_back(neg[k]);
        if (k < pos.size()) out.push_back(pos[k]);
      }
    }
    i = j;
  }
  return out;
}

std::vector<double> ascending(const Eigen::VectorXd& ev) { return {ev.data(), ev.data() + ev.size()}; }

OperatorMatrix sphere_op(int q, double r, int l_max_twice) {
  const auto s = ModelManifold::sphere(r);
  return assemble_sphere(ConnectionSpec::constant_curvature(s, {q}), SphereBasis::for_degrees(HalfInt{l_max_twice}, {q}, r));
}

void check_symmetric(const Eigen::VectorXd& ev, double tol) {
  const Eigen::Index n = ev.size();
  for (Eigen::Index i = 0; i < n; ++i) CHECK(std::abs(ev(i) + ev(n - 1 - i)) < tol);
}

std::vector<OperatorMatrix> model_operators() {
  std::vector<OperatorMatrix> ops;
  for (int q = -3; q <= 3; ++q) ops.push_back(sphere_op(q, 1.0, 9));
  ops.push_back(sphere_op(-1, 2.0, 7));
  const auto s = ModelManifold::sphere(1.0);
  const auto ends = assemble_family_endpoints(s, SphereBasis::for_degrees(HalfInt{7}, {+1, -1}, 1.0));
  for (double t : {0.0, 0.3, 1.0}) ops.push_back(interpolate_family(ends, t));
  for (int d : {-2, 0, 1}) ops.push_back(assemble_sphere_complex(d, SphereBasis::for_degrees(HalfInt{7}, {d + 1}, 1.0)));
  const auto torus = ModelManifold::flat_torus(2 * pi, 2 * pi);
  for (int d : {-1, 0, 2}) {
    const auto lat = TorusLattice::build(torus.as<FlatTorus>(), d, 8, 10);
    ops.push_back(assemble_torus_lattice(ConnectionSpec::constant_curvature(torus, {d}), lat));
  }
  return ops;
}

}  // namespace

TEST_CASE("every assembled operator is Hermitian and odd") {
  for (const auto& op : model_operators()) {
    CHECK(hermiticity_defect(op) < 1e-12);
    REQUIRE(op.grading.has_value());
    CHECK(chirality_defect(op) < 1e-12);
    CHECK(op.plus_dimension() + op.minus_dimension() == op.dimension());
  }
  const auto c = assemble_circle(CircleBasis{8, 2 * pi, CircleSpin::bounding});
  CHECK(hermiticity_defect(c) == 0.0);
  CHECK_FALSE(c.grading.has_value());
}

TEST_CASE("spectral symmetry") {
  for (const auto& op : model_operators()) {
    const double tol = op.backend == Backend::torus_lattice ? 1e-6 : 1e-9;
    check_symmetric(oracle::dense_eigenvalues(op.matrix), tol);
  }
}

TEST_CASE("untwisted unit sphere at l_max 9/2") {
  const auto v = sorted_by_magnitude(oracle::dense_eigenvalues(sphere_op(0, 1.0, 9).matrix));
  REQUIRE(v.size() == 60);
  std::size_t i = 0;
  for (int k = 1; k <= 5; ++k) {
    for (int j = 0; j < k; ++j) CHECK(v[i++] == doctest::Approx(-k).epsilon(1e-12));
    for (int j = 0; j < k; ++j) CHECK(v[i++] == doctest::Approx(-k).epsilon(1e-12));
    for (int j = 0; j < 2 * k; ++j) CHECK(v[i++] == doctest::Approx(k).epsilon(1e-12));
  }
}

TEST_CASE("twisted sphere spectrum matches the representation-theory oracle") {
  for (double r : {1.0, 2.0}) {
    for (int q = -3; q <= 3; ++q) {
      for (int lm : {9, 13}) {
        const auto v = alternating_by_magnitude(oracle::dense_eigenvalues(sphere_op(q, r, lm).matrix));
        const int count = 30;
        const auto ref = oracle::sphere_spectrum(q, r, count);
        for (int i = 0; i < count; ++i) CHECK(std::abs(v[i] - ref[i]) < 1e-10);
      }
    }
  }
}

TEST_CASE("charge -1 sphere: one zero mode and lambda^2 = 2") {
  for (int lm : {5, 9, 13}) {
    const auto v = sorted_by_magnitude(oracle::dense_eigenvalues(sphere_op(-1, 1.0, lm).matrix));
    CHECK(std::abs(v[0]) < 1e-12);
    CHECK(std::abs(v[1]) > 1.0);
    CHECK(v[1] * v[1] == doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("truncation convergence of the smallest magnitudes") {
  for (int q : {-2, 0, 1}) {
    const auto a = sorted_by_magnitude(oracle::dense_eigenvalues(sphere_op(q, 1.0, 9).matrix));
    const auto b = sorted_by_magnitude(oracle::dense_eigenvalues(sphere_op(q, 1.0, 13).matrix));
    for (int i = 0; i < 10; ++i) CHECK(std::abs(std::abs(a[i]) - std::abs(b[i])) < 1e-10);
  }
  const auto s = ModelManifold::sphere(1.0);
  for (double t : {0.25, 0.75}) {
    const auto ea = assemble_family_endpoints(s, SphereBasis::for_degrees(HalfInt{21}, {+1, -1}, 1.0));
    const auto eb = assemble_family_endpoints(s, SphereBasis::for_degrees(HalfInt{25}, {+1, -1}, 1.0));
    const auto a = sorted_by_magnitude(oracle::dense_eigenvalues(interpolate_family(ea, t).matrix));
    const auto b = sorted_by_magnitude(oracle::dense_eigenvalues(interpolate_family(eb, t).matrix));
    for (int i = 0; i < 10; ++i) CHECK(std::abs(std::abs(a[i]) - std::abs(b[i])) < 1e-10);
  }
}

TEST_CASE("Weitzenbock identity on the untwisted sphere") {
  for (double r : {1.0, 1.5}) {
    const auto s = ModelManifold::sphere(r);
    const auto conn = ConnectionSpec::constant_curvature(s, {0});
    const auto basis = SphereBasis::for_degrees(HalfInt{21}, {0}, r);
    const Eigen::MatrixXcd d(assemble_sphere(conn, basis).matrix);
    const Eigen::MatrixXcd lap(assemble_sphere_spinor_laplacian(conn, basis).matrix);
    const double quarter_r = scalar_curvature_min(s) / 4.0;
    const Eigen::MatrixXcd resid =
        d * d - lap - quarter_r * Eigen::MatrixXcd::Identity(d.rows(), d.cols());
    CHECK(resid.cwiseAbs().maxCoeff() < 1e-10);
    CHECK(oracle::dense_eigenvalues((d * d).sparseView()).minCoeff() >= quarter_r - 1e-10);
  }
}

TEST_CASE("trivial frame multiplies multiplicities") {
  const auto s = ModelManifold::sphere(1.0);
  const auto basis = SphereBasis::for_degrees(HalfInt{7}, {0}, 1.0);
  const auto one = ascending(oracle::dense_eigenvalues(assemble_sphere(ConnectionSpec::trivial_frame(s, 1), basis).matrix));
  for (int n : {2, 3}) {
    const auto many =
        ascending(oracle::dense_eigenvalues(assemble_sphere(ConnectionSpec::trivial_frame(s, n), basis).matrix));
    REQUIRE(many.size() == n * one.size());
    for (std::size_t i = 0; i < many.size(); ++i) CHECK(std::abs(many[i] - one[i / n]) < 1e-12);
  }
  const auto torus = ModelManifold::flat_torus(2 * pi, 2 * pi);
  const auto lat = TorusLattice::build(torus.as<FlatTorus>(), 0, 8, 8);
  const auto l1 = ascending(oracle::dense_eigenvalues(assemble_torus_lattice(ConnectionSpec::trivial_frame(torus, 1), lat).matrix));
  const auto l2 = ascending(oracle::dense_eigenvalues(assemble_torus_lattice(ConnectionSpec::trivial_frame(torus, 2), lat).matrix));
  REQUIRE(l2.size() == 2 * l1.size());
  for (std::size_t i = 0; i < l2.size(); ++i) CHECK(std::abs(l2[i] - l1[i / 2]) < 1e-10);
}

TEST_CASE("family is affine in t") {
  const auto s = ModelManifold::sphere(1.0);
  const auto ends = assemble_family_endpoints(s, SphereBasis::for_degrees(HalfInt{9}, {+1, -1}, 1.0));
  const SparseMatrixC diff = ends.a1.matrix - ends.a0.matrix;
  for (double t : {0.25, 0.5, 0.75}) {
    const SparseMatrixC expected = ends.a0.matrix + t * diff;
    const Eigen::MatrixXcd gap = Eigen::MatrixXcd(interpolate_family(ends, t).matrix) - Eigen::MatrixXcd(expected);
    CHECK(gap.cwiseAbs().maxCoeff() < 1e-15);
  }
  const Eigen::MatrixXcd half = Eigen::MatrixXcd(interpolate_family(ends, 0.5).matrix - ends.a0.matrix);
  CHECK(half.norm() == doctest::Approx(0.5 * Eigen::MatrixXcd(diff).norm()).epsilon(1e-14));
  CHECK_THROWS_AS(interpolate_family(ends, 1.2), DomainError);
}

TEST_CASE("family endpoints") {
  const auto s = ModelManifold::sphere(1.0);
  const auto ends = assemble_family_endpoints(s, SphereBasis::for_degrees(HalfInt{9}, {+1, -1}, 1.0));
  const auto e0 = ascending(oracle::dense_eigenvalues(ends.a0.matrix));
  const auto e1 = ascending(oracle::dense_eigenvalues(ends.a1.matrix));

  const auto untwisted = ascending(oracle::dense_eigenvalues(
      assemble_sphere(ConnectionSpec::trivial_frame(s, 1), SphereBasis::for_degrees(HalfInt{9}, {0}, 1.0)).matrix));
  std::vector<double> doubled;
  for (double v : untwisted) doubled.insert(doubled.end(), {v, v});
  // The family basis carries both weight classes, so compare the low band.
  const auto m0 = sorted_by_magnitude(Eigen::Map<const Eigen::VectorXd>(e0.data(), e0.size()));
  const auto md = sorted_by_magnitude(Eigen::Map<const Eigen::VectorXd>(doubled.data(), doubled.size()));
  for (int i = 0; i < 40; ++i) CHECK(std::abs(m0[i] - md[i]) < 1e-9);

  std::vector<double> split;
  for (int q : {+1, -1}) {
    const auto v = ascending(oracle::dense_eigenvalues(sphere_op(q, 1.0, 9).matrix));
    split.insert(split.end(), v.begin(), v.end());
  }
  std::sort(split.begin(), split.end());
  REQUIRE(split.size() == e1.size());
  for (std::size_t i = 0; i < e1.size(); ++i) CHECK(std::abs(e1[i] - split[i]) < 1e-9);
}

TEST_CASE("complex twist reproduces the real twisted operator") {
  for (int q : {0, -1, -2}) {
    const auto real_ev = ascending(oracle::dense_eigenvalues(sphere_op(q, 1.0, 13).matrix));
    const auto cplx = assemble_sphere_complex(q - 1, SphereBasis::for_degrees(HalfInt{13}, {q}, 1.0));
    const auto cplx_ev = ascending(oracle::dense_eigenvalues(cplx.matrix));
    REQUIRE(real_ev.size() == cplx_ev.size());
    for (std::size_t i = 0; i < real_ev.size(); ++i) CHECK(std::abs(real_ev[i] - cplx_ev[i]) < 1e-9);
  }
}

TEST_CASE("circle spectra") {
  auto values = [](const OperatorMatrix& op) {
    Eigen::VectorXd d = Eigen::MatrixXcd(op.matrix).diagonal().real();
    std::sort(d.data(), d.data() + d.size());
    return d;
  };
  const auto nb = values(assemble_circle(CircleBasis{4, 2 * pi, CircleSpin::non_bounding}));
  REQUIRE(nb.size() == 9);
  for (int i = 0; i < 9; ++i) CHECK(nb(i) == doctest::Approx(i - 4.0).epsilon(1e-15));
  const auto b = values(assemble_circle(CircleBasis{4, 2 * pi, CircleSpin::bounding}));
  CHECK(b.cwiseAbs().minCoeff() == doctest::Approx(0.5).epsilon(1e-15));
  const auto half = values(assemble_circle(CircleBasis{4, pi, CircleSpin::non_bounding}));
  for (int i = 0; i + 1 < half.size(); ++i) CHECK(half(i + 1) - half(i) == doctest::Approx(2.0).epsilon(1e-14));
  const auto c = assemble_circle(CircleBasis{4, 2 * pi, CircleSpin::bounding});
  CHECK(Eigen::MatrixXcd(c.matrix).isDiagonal());
}

TEST_CASE("lattice free torus approaches the Fourier spectrum") {
  const auto torus = ModelManifold::flat_torus(2 * pi, 2 * pi);
  const auto lat = TorusLattice::build(torus.as<FlatTorus>(), 0, 32, 32);
  const auto op = assemble_torus_lattice(ConnectionSpec::trivial_frame(torus, 1), lat);
  CHECK(op.hermitization_multiplicity == 2);
  const auto spec = eigen_smallest(op, 16, 0.35);
  for (double v : spec.eigenvalues) CHECK(std::abs(std::abs(v) - std::sqrt(0.5)) / std::sqrt(0.5) < 0.03);

  const auto per = ModelManifold::flat_torus(2 * pi, 2 * pi, {CycleSpin::periodic, CycleSpin::periodic});
  const auto lp = TorusLattice::build(per.as<FlatTorus>(), 0, 8, 8);
  const auto vp = sorted_by_magnitude(oracle::dense_eigenvalues(assemble_torus_lattice(ConnectionSpec::trivial_frame(per, 1), lp).matrix));
  CHECK(std::abs(vp[0]) < 1e-12);
}

TEST_CASE("lattice assembly rejects inconsistent inputs") {
  const auto torus = ModelManifold::flat_torus(2 * pi, 2 * pi);
  auto lat = TorusLattice::build(torus.as<FlatTorus>(), 1, 8, 8);
  CHECK_THROWS_AS(assemble_torus_lattice(ConnectionSpec::constant_curvature(torus, {-1}), lat), Error);
  lat.link2[5] *= std::polar(1.0, 0.3);
  CHECK_THROWS_AS(assemble_torus_lattice(ConnectionSpec::constant_curvature(torus, {1}), lat), FluxError);
  CHECK_THROWS_AS(assemble_torus_lattice(ConnectionSpec::constant_curvature(ModelManifold::sphere(1.0), {1}),
                                         TorusLattice::build(torus.as<FlatTorus>(), 1, 8, 8)),
                  DomainError);
}

TEST_CASE("sphere assembly rejects a basis missing a weight") {
  const auto s = ModelManifold::sphere(1.0);
  CHECK_THROWS_AS(assemble_sphere(ConnectionSpec::constant_curvature(s, {-1}), SphereBasis::for_degrees(HalfInt{9}, {0}, 1.0)),
                  TruncationError);
}
