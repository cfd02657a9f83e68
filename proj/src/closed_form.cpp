#include "diraclab/closed_form.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "diraclab/errors.hpp"
#include "diraclab/spectrum.hpp"

namespace diraclab {

std::vector<double> landau_spectrum(const FlatTorus& torus, int degree, int levels) {
  if (degree == 0) throw DomainError("Landau levels need a nonzero degree");
  const int mult = std::abs(degree);
  const double v = torus.length1 * torus.length2;
  std::vector<double> out(static_cast<std::size_t>(mult), 0.0);
  for (int k = 1; k <= levels; ++k) {
    const double l = std::sqrt(4.0 * std::numbers::pi * mult * k / v);
    for (int i = 0; i < mult; ++i) {
      out.push_back(-l);
      out.push_back(l);
    }
  }
  sort_by_magnitude(out);
  return out;
}

std::vector<double> free_torus_spectrum(const FlatTorus& torus, int k_max) {
  const double d1 = torus.spin[0] == CycleSpin::antiperiodic ? 0.5 : 0.0;
  const double d2 = torus.spin[1] == CycleSpin::antiperiodic ? 0.5 : 0.0;
  std::vector<double> out;
  for (int k1 = -k_max; k1 <= k_max; ++k1) {
    for (int k2 = -k_max; k2 <= k_max; ++k2) {
      const double w = std::hypot(2.0 * std::numbers::pi * (k1 + d1) / torus.length1,
                                  2.0 * std::numbers::pi * (k2 + d2) / torus.length2);
      out.push_back(-w);
      out.push_back(w);
    }
  }
  sort_by_magnitude(out);
  return out;
}

double predicted_first_nonzero(const ConnectionSpec& conn) {
  if (!conn.base().is<FlatTorus>()) throw DomainError("closed-form gap is available on flat tori only");
  const auto& torus = conn.base().as<FlatTorus>();
  int degree = 0;
  if (conn.is<ConstantCurvature>()) {
    for (int d : conn.as<ConstantCurvature>().degrees) {
      if (d != 0 && (degree == 0 || std::abs(d) < std::abs(degree))) degree = d;
    }
  }
  if (degree != 0) return landau_spectrum(torus, degree, 1).back();
  double best = std::numeric_limits<double>::infinity();
  for (double v : free_torus_spectrum(torus, 2)) {
    if (std::abs(v) > 0.0) best = std::min(best, std::abs(v));
  }
  return best;
}

}  // namespace diraclab
