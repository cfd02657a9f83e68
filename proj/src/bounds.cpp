#include "diraclab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "diraclab/errors.hpp"

namespace diraclab {

constexpr double kPi = std::numbers::pi;

double friedrich_bound(int n, double R0) {
  if (n < 2) throw DomainError("Friedrich bound needs dimension n >= 2");
  return n * R0 / (4.0 * (n - 1));
}

double kirchberg_bound(int k, double R0, KirchbergParity parity) {
  if (k < 1) throw DomainError("Kirchberg bound needs complex dimension k >= 1");
  const bool even = k % 2 == 0;
  if (parity == KirchbergParity::even && !even) {
    throw DomainError("complex dimension " + std::to_string(k) + " declared even");
  }
  if (parity == KirchbergParity::odd && even) {
    throw DomainError("complex dimension " + std::to_string(k) + " declared odd");
  }
  if (even) return k * R0 / (4.0 * (k - 1));
  return (k + 1) * R0 / (4.0 * k);
}

double he_complex_bound(int deg, int rk, double vol) {
  if (deg >= 0) throw ApplicabilityError("complex HE bound needs negative degree, got " + std::to_string(deg));
  if (rk < 1 || !(vol > 0.0)) throw DomainError("rank and volume must be positive");
  return -4.0 * kPi * deg / (rk * vol);
}

int translate_twist(int deg_E, int rk, int g) { return deg_E - rk * (1 - g); }

double he_real_bound(int deg, int rk, double vol, int g) {
  if (rk < 1 || !(vol > 0.0)) throw DomainError("rank and volume must be positive");
  return 4.0 * kPi * (1 - g) / vol - 4.0 * kPi * deg / (rk * vol);
}

bool he_real_significant(int deg, int rk, int g) { return deg < rk * (1 - g); }

double gauss_bonnet_form(double R0, int deg, int rk, int g, double vol) {
  if (rk < 1 || !(vol > 0.0)) throw DomainError("rank and volume must be positive");
  if (g == 1) return -4.0 * kPi * deg / (rk * vol);
  if (std::abs(R0 * vol - 8.0 * kPi * (1 - g)) > 1e-8) {
    throw DomainError("R0 vol differs from 8 pi (1 - g); the surface is not of constant curvature");
  }
  return 0.5 * R0 * (1.0 - static_cast<double>(deg) / ((1 - g) * rk));
}

BoundReport bound_verdict(const SpectrumResult& spec, double bound_value, double atol) {
  BoundReport r;
  r.bound_value = bound_value;
  r.atol = atol;
  const double l = first_nonzero(spec);
  r.observed_min_lambda_sq = l * l;
  r.satisfied = r.observed_min_lambda_sq >= bound_value - atol;
  r.attained = std::abs(r.observed_min_lambda_sq - bound_value) <= atol;
  return r;
}

std::vector<BoundReport> surface_bounds(const ConnectionSpec& conn, const SpectrumResult& spec, double atol,
                                        bool relative) {
  const auto& base = conn.base();
  if (dimension(base) != 2) throw DimensionError("surface bounds need a surface base");
  const double R0 = scalar_curvature_min(base);
  const double vol = volume(base);
  const int g = genus(base);
  const auto& degrees = conn.bundle().summand_degrees();
  const int rk = conn.bundle().rank();
  const int deg = conn.bundle().total_degree();
  const bool flat = conn.is<TrivialFrame>() ||
                    (conn.is<ConstantCurvature>() &&
                     std::all_of(conn.as<ConstantCurvature>().degrees.begin(),
                                 conn.as<ConstantCurvature>().degrees.end(), [](int d) { return d == 0; }));
  // A direct sum is Hermitian-Einstein only when all summands share a slope.
  const bool he = !conn.is<Interpolated>() &&
                  std::all_of(degrees.begin(), degrees.end(), [&](int d) { return d == degrees.front(); });

  std::vector<BoundReport> out;
  const auto add = [&](std::string name, double value, bool applicable, std::string why, BoundInputs in) {
    BoundReport r = bound_verdict(spec, value, relative ? atol * std::abs(value) : atol);
    r.bound_name = std::move(name);
    r.applicable = applicable;
    r.applicability = std::move(why);
    r.inputs = in;
    out.push_back(std::move(r));
  };

  if (flat) {
    add("friedrich", friedrich_bound(2, R0), true, "flat twist", {R0, 2, {}, {}, {}, {}, {}});
    add("kirchberg", kirchberg_bound(1, R0), true, "flat twist, k = 1", {R0, {}, 1, {}, {}, {}, {}});
  }
  if (he) {
    const bool sig = he_real_significant(deg, rk, g);
    add("he_real", he_real_bound(deg, rk, vol, g), sig,
        sig ? "deg < rk (1 - g)" : "vacuous: deg >= rk (1 - g)", {R0, {}, {}, deg, rk, vol, g});
    add("gauss_bonnet", gauss_bonnet_form(R0, deg, rk, g, vol), sig,
        sig ? "deg < rk (1 - g)" : "vacuous: deg >= rk (1 - g)", {R0, {}, {}, deg, rk, vol, g});
    const int deg_l = translate_twist(deg, rk, g);
    if (deg_l < 0) {
      add("he_complex", he_complex_bound(deg_l, rk, vol), true, "deg L = " + std::to_string(deg_l) + " < 0",
          {R0, {}, {}, deg_l, rk, vol, g});
    }
  }
  return out;
}

}  // namespace diraclab
