#include "diraclab/basis.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include <boost/multiprecision/cpp_int.hpp>

#include "diraclab/errors.hpp"

namespace diraclab {

namespace mp = boost::multiprecision;

SphereBasis::SphereBasis(HalfInt l_max, std::vector<HalfInt> spin_weights, double radius)
    : l_max_(l_max), weights_(std::move(spin_weights)), radius_(radius) {
  if (l_max_.twice < 2) throw DomainError("sphere truncation l_max must be at least 1");
  if (!(radius_ > 0.0)) throw DomainError("sphere radius must be positive");
  if (weights_.empty()) throw DomainError("sphere basis needs at least one spin weight");
  std::sort(weights_.begin(), weights_.end());
  weights_.erase(std::unique(weights_.begin(), weights_.end()), weights_.end());
  for (HalfInt s : weights_) {
    if (top_l(s) < s.abs()) {
      throw TruncationError("l_max " + l_max_.str() + " admits no modes of spin weight " + s.str());
    }
  }
}

SphereBasis SphereBasis::for_degrees(HalfInt l_max, const std::vector<int>& degrees, double radius) {
  std::vector<HalfInt> w;
  for (int q : degrees) {
    w.push_back(HalfInt::from_twice(q - 1));
    w.push_back(HalfInt::from_twice(q + 1));
  }
  return SphereBasis(l_max, std::move(w), radius);
}

bool SphereBasis::has_weight(HalfInt s) const {
  return std::binary_search(weights_.begin(), weights_.end(), s);
}

HalfInt SphereBasis::top_l(HalfInt s) const {
  return same_class(l_max_, s) ? l_max_ : HalfInt::from_twice(l_max_.twice - 1);
}

std::vector<SphereMode> SphereBasis::modes(HalfInt s) const {
  std::vector<SphereMode> out;
  for (HalfInt l = s.abs(); l <= top_l(s); l = l + HalfInt::integer(1)) {
    for (HalfInt m = -l; m <= l; m = m + HalfInt::integer(1)) out.push_back({s, l, m});
  }
  return out;
}

int SphereBasis::mode_count(HalfInt s) const {
  int n = 0;
  for (HalfInt l = s.abs(); l <= top_l(s); l = l + HalfInt::integer(1)) n += l.twice + 1;
  return n;
}

double eth_coefficient(HalfInt s, HalfInt l, Ladder direction, double radius) {
  if (l < s.abs()) throw DomainError("eth coefficient needs l >= |s|");
  // In doubled units (l-s)(l+s+1) = (2l-2s)(2l+2s+2)/4.
  const int a = l.twice - s.twice;
  const int b = l.twice + s.twice;
  if (direction == Ladder::raise) {
    const long p = static_cast<long>(a) * (b + 2);
    return kEthSign * std::sqrt(static_cast<double>(p)) / (2.0 * radius);
  }
  const long p = static_cast<long>(b) * (a + 2);
  return -kEthSign * std::sqrt(static_cast<double>(p)) / (2.0 * radius);
}

namespace {

mp::cpp_int factorial(int n) {
  static std::mutex mu;
  static std::vector<mp::cpp_int> table{1};
  std::lock_guard<std::mutex> lock(mu);
  while (static_cast<int>(table.size()) <= n) {
    table.push_back(table.back() * static_cast<long>(table.size()));
  }
  return table[n];
}

}  // namespace

double wigner3j(HalfInt l1, HalfInt l2, HalfInt l3, HalfInt m1, HalfInt m2, HalfInt m3) {
  const int j1 = l1.twice, j2 = l2.twice, j3 = l3.twice;
  const int a1 = m1.twice, a2 = m2.twice, a3 = m3.twice;
  if (j1 < 0 || j2 < 0 || j3 < 0) return 0.0;
  if (a1 + a2 + a3 != 0) return 0.0;
  if (std::abs(a1) > j1 || std::abs(a2) > j2 || std::abs(a3) > j3) return 0.0;
  if ((j1 + a1) % 2 || (j2 + a2) % 2 || (j3 + a3) % 2) return 0.0;
  if ((j1 + j2 + j3) % 2) return 0.0;
  if (j3 > j1 + j2 || j3 < std::abs(j1 - j2)) return 0.0;

  // Everything below is in ordinary (halved) units; all arguments are integers.
  const auto h = [](int twice) { return twice / 2; };
  const int s12m3 = h(j1 + j2 - j3), s13m2 = h(j1 - j2 + j3), s23m1 = h(-j1 + j2 + j3);
  const int total = h(j1 + j2 + j3);

  mp::cpp_rational prefactor(factorial(s12m3) * factorial(s13m2) * factorial(s23m1),
                             factorial(total + 1));
  prefactor *= factorial(h(j1 + a1)) * factorial(h(j1 - a1)) * factorial(h(j2 + a2)) *
               factorial(h(j2 - a2)) * factorial(h(j3 + a3)) * factorial(h(j3 - a3));

  const int kmin = std::max({0, h(j2 - j3 - a1), h(j1 - j3 + a2)});
  const int kmax = std::min({s12m3, h(j1 - a1), h(j2 + a2)});
  mp::cpp_rational sum = 0;
  for (int k = kmin; k <= kmax; ++k) {
    const mp::cpp_int den = factorial(k) * factorial(h(j3 - j2 + a1) + k) *
                            factorial(h(j3 - j1 - a2) + k) * factorial(s12m3 - k) *
                            factorial(h(j1 - a1) - k) * factorial(h(j2 + a2) - k);
    const mp::cpp_rational term(mp::cpp_int(1), den);
    if (k % 2) {
      sum -= term;
    } else {
      sum += term;
    }
  }
  if (sum == 0) return 0.0;
  const int phase_exp = h(j1 - j2 - a3);
  const int sign = ((phase_exp % 2 + 2) % 2 ? -1 : 1) * (sum < 0 ? -1 : 1);
  const mp::cpp_rational squared = sum * sum * prefactor;
  return sign * std::sqrt(squared.convert_to<double>());
}

std::complex<double> coupling_element(const SphereMode& a, const SphereMode& b, const SphereMode& beta) {
  if ((a.m + b.m + beta.m).twice != 0) return 0.0;
  if ((a.s + b.s + beta.s).twice != 0) return 0.0;
  const double w_m = wigner3j(a.l, beta.l, b.l, a.m, beta.m, b.m);
  if (w_m == 0.0) return 0.0;
  const double w_s = wigner3j(a.l, beta.l, b.l, -a.s, -beta.s, -b.s);
  if (w_s == 0.0) return 0.0;
  const double norm = std::sqrt((a.l.twice + 1.0) * (beta.l.twice + 1.0) * (b.l.twice + 1.0) /
                                (4.0 * std::numbers::pi));
  return norm * w_m * w_s;
}

std::complex<double> matrix_element(const SphereMode& a, const SphereMode& beta, const SphereMode& b) {
  const SphereMode conj_a{-a.s, a.l, -a.m};
  const int phase = ((a.m + a.s).twice / 2) % 2 == 0 ? 1 : -1;
  return static_cast<double>(phase) * coupling_element(conj_a, b, beta);
}

CircleBasis CircleBasis::for_circle(const Circle& c, int k_max) {
  if (k_max < 1) throw DomainError("circle truncation k_max must be at least 1");
  return CircleBasis{k_max, c.length, c.spin};
}

TorusLattice TorusLattice::build(const FlatTorus& torus, int degree, int n1, int n2, double wilson) {
  if (n1 < 8 || n2 < 8) throw DomainError("torus lattice needs at least 8 sites per direction");
  if (!(wilson > 0.0 && wilson <= 1.0)) throw DomainError("Wilson parameter must lie in (0, 1]");
  TorusLattice lat;
  lat.n1 = n1;
  lat.n2 = n2;
  lat.wilson = wilson;
  lat.torus = torus;
  lat.degree = degree;
  const std::size_t n = static_cast<std::size_t>(n1) * n2;
  lat.link1.assign(n, 1.0);
  lat.link2.assign(n, 1.0);
  // A link carries the transport exp(-i \int a) of the connection d - i a,
  // whose curvature -i da integrates to degree (1 / 2 pi) \int da.
  const double flux = 2.0 * std::numbers::pi * degree / (static_cast<double>(n1) * n2);
  for (int x2 = 0; x2 < n2; ++x2) {
    for (int x1 = 0; x1 < n1; ++x1) {
      lat.link2[lat.site(x1, x2)] = std::polar(1.0, -flux * x1);
    }
    // The seam in direction 1 closes the gauge field around the torus.
    lat.link1[lat.site(n1 - 1, x2)] = std::polar(1.0, flux * n1 * x2);
  }
  return lat;
}

double TorusLattice::plaquette_angle(int x1, int x2) const {
  const auto u = link1[site(x1, x2)] * link2[site(x1 + 1, x2)] * std::conj(link1[site(x1, x2 + 1)]) *
                 std::conj(link2[site(x1, x2)]);
  return -std::arg(u);
}

double TorusLattice::total_flux() const {
  double acc = 0.0;
  for (int x2 = 0; x2 < n2; ++x2) {
    for (int x1 = 0; x1 < n1; ++x1) acc += plaquette_angle(x1, x2);
  }
  return acc;
}

}  // namespace diraclab
