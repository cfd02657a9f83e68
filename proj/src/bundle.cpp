#include "diraclab/bundle.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <sstream>

#include "diraclab/detail/overloaded.hpp"
#include "diraclab/errors.hpp"

namespace diraclab {

using detail::overloaded;

BundleSpec::BundleSpec(ModelManifold base, std::vector<int> summand_degrees)
    : base_(std::move(base)), degrees_(std::move(summand_degrees)) {
  if (degrees_.empty()) throw DomainError("bundle rank must be at least 1");
  if (dimension(base_) != 2) {
    for (int d : degrees_) {
      if (d != 0) throw DimensionError("line-bundle degrees are defined only over surfaces");
    }
  }
}

int BundleSpec::total_degree() const { return std::accumulate(degrees_.begin(), degrees_.end(), 0); }

ConnectionSpec ConnectionSpec::constant_curvature(const ModelManifold& base, std::vector<int> degrees) {
  if (dimension(base) != 2) {
    throw DimensionError("constant-curvature connections require a surface base");
  }
  BundleSpec bundle(base, degrees);
  return ConnectionSpec(ConstantCurvature{std::move(degrees)}, std::move(bundle));
}

ConnectionSpec ConnectionSpec::constant_curvature_on(const BundleSpec& bundle, std::vector<int> degrees) {
  if (dimension(bundle.base()) != 2) {
    throw DimensionError("constant-curvature connections require a surface base");
  }
  if (static_cast<int>(degrees.size()) != bundle.rank()) {
    throw DimensionMismatchError("connection summand count differs from the bundle rank");
  }
  return ConnectionSpec(ConstantCurvature{std::move(degrees)}, bundle);
}

ConnectionSpec ConnectionSpec::trivial_frame(const ModelManifold& base, int rank) {
  if (rank < 1) throw DomainError("trivial frame rank must be at least 1");
  return ConnectionSpec(TrivialFrame{rank}, BundleSpec(base, std::vector<int>(rank, 0)));
}

std::string ConnectionSpec::describe() const {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const ConstantCurvature& c) {
                   os << "constant_curvature[";
                   for (std::size_t i = 0; i < c.degrees.size(); ++i) os << (i ? "," : "") << c.degrees[i];
                   os << "]";
                 },
                 [&](const TrivialFrame& f) { os << "trivial_frame(" << f.rank << ")"; },
                 [&](const Interpolated& f) { os << "interpolated(t=" << f.t << ")"; },
             },
             v_);
  os << " on " << base().name();
  return os.str();
}

double he_constant(int degree, int rank, double volume) {
  if (rank < 1) throw DomainError("rank must be at least 1");
  if (!(volume > 0.0)) throw DomainError("volume must be positive");
  return 2.0 * std::numbers::pi * degree / (rank * volume);
}

double tautological_second_fundamental_form(double radius, double theta) {
  // Stereographic coordinate z = cot(theta/2) e^{i phi}. The line is spanned
  // by (1, z)/rho with rho^2 = 1 + |z|^2; projecting d/dz of that frame onto
  // the complement gives |beta(d/dz)| = 1/rho^2, while the round metric
  // 4 r^2 |dz|^2 / rho^4 gives |d/dz| = sqrt(2) r / rho^2.
  const double cot = std::cos(0.5 * theta) / std::sin(0.5 * theta);
  const double rho2 = 1.0 + cot * cot;
  const double beta_dz = 1.0 / rho2;
  const double dz_norm = std::sqrt(2.0) * radius / rho2;
  return beta_dz / dz_norm;
}

Eigen::MatrixXcd curvature_density(const ConnectionSpec& conn, const QuadraturePoint& p) {
  using cd = std::complex<double>;
  const cd I(0.0, 1.0);
  const int rank = conn.bundle().rank();
  Eigen::MatrixXcd f = Eigen::MatrixXcd::Zero(rank, rank);
  if (dimension(conn.base()) != 2) {
    throw DimensionError("curvature density is evaluated on surfaces only");
  }
  const double vol = volume(conn.base());
  std::visit(overloaded{
                 [&](const ConstantCurvature& c) {
                   for (int k = 0; k < rank; ++k) f(k, k) = -I * he_constant(c.degrees[k], 1, vol);
                 },
                 [&](const TrivialFrame&) {},
                 [&](const Interpolated& fam) {
                   // Summand 0 is H (degree +1), summand 1 is the tautological
                   // line H^{-1}. The (1-t) beta term contributes its
                   // off-diagonal covariant derivative, which vanishes for the
                   // homogeneous second fundamental form, and beta ^ beta on the
                   // diagonal.
                   const double r = conn.base().as<Sphere>().radius;
                   const double b = tautological_second_fundamental_form(r, p.u);
                   const double s = (1.0 - fam.t) * (1.0 - fam.t);
                   f(0, 0) = -I * he_constant(+1, 1, vol) + s * I * b * b;
                   f(1, 1) = -I * he_constant(-1, 1, vol) - s * I * b * b;
                 },
             },
             conn.variant());
  return f;
}

DegreeIntegral integrate_degree(const ConnectionSpec& conn, int quadrature_order) {
  if (dimension(conn.base()) != 2) {
    throw DimensionError("degree integration requires a surface base");
  }
  const auto pts = surface_quadrature(conn.base(), quadrature_order);
  // Sum in a fixed order; tr F is imaginary so (i/2pi) tr F is real.
  std::complex<double> acc = 0.0;
  for (const auto& p : pts) acc += curvature_density(conn, p).trace() * p.weight;
  const double raw = (std::complex<double>(0.0, 1.0) * acc).real() / (2.0 * std::numbers::pi);
  const double rounded = std::round(raw);
  return {static_cast<int>(rounded), raw, std::abs(raw - rounded)};
}

int degree_from_curvature(const ConnectionSpec& conn) {
  const auto d = integrate_degree(conn);
  if (d.residual >= 1e-6) {
    throw QuantizationError("curvature integral " + std::to_string(d.raw) +
                            " is not an integer; the connection is mis-assembled");
  }
  return d.degree;
}

ConnectionSpec stabilized_family(double t, const ModelManifold& sphere) {
  if (!sphere.is<Sphere>()) throw DomainError("the stabilized family is defined over a round sphere");
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("family parameter t must lie in [0, 1]");
  return ConnectionSpec(Interpolated{t}, BundleSpec(sphere, {+1, -1}));
}

}  // namespace diraclab
