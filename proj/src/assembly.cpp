#include "diraclab/assembly.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "diraclab/detail/overloaded.hpp"
#include "diraclab/errors.hpp"

namespace diraclab {

using detail::overloaded;
using cd = std::complex<double>;
using Triplet = Eigen::Triplet<cd>;

namespace {

const cd kI(0.0, 1.0);

std::string sphere_truncation(const SphereBasis& basis) {
  return "l_max=" + basis.l_max().str() + ",r=" + std::to_string(basis.radius());
}

using ModeIndex = std::map<std::pair<int, int>, Eigen::Index>;

ModeIndex index_modes(const SphereComponent& c) {
  ModeIndex idx;
  for (std::size_t k = 0; k < c.modes.size(); ++k) {
    idx[{c.modes[k].l.twice, c.modes[k].m.twice}] = c.offset + static_cast<Eigen::Index>(k);
  }
  return idx;
}

std::vector<int> sphere_degrees(const ConnectionSpec& conn) {
  return std::visit(overloaded{
                        [](const ConstantCurvature& c) { return c.degrees; },
                        [](const TrivialFrame& f) { return std::vector<int>(f.rank, 0); },
                        [](const Interpolated&) { return std::vector<int>{+1, -1}; },
                    },
                    conn.variant());
}

Eigen::VectorXd grading_of(const std::vector<SphereComponent>& layout, Eigen::Index n) {
  Eigen::VectorXd g(n);
  for (const auto& c : layout) {
    g.segment(c.offset, static_cast<Eigen::Index>(c.modes.size())).setConstant(c.chirality);
  }
  return g;
}

Eigen::Index layout_size(const std::vector<SphereComponent>& layout) {
  return layout.empty() ? 0 : layout.back().offset + static_cast<Eigen::Index>(layout.back().modes.size());
}

// Ladder blocks pairing S^+ (x) L_q (weight (q-1)/2) with S^- (x) L_q
// (weight (q+1)/2) for every summand, mode by mode.
void add_ladder_blocks(const std::vector<SphereComponent>& layout, double radius,
                       std::vector<Triplet>& out) {
  for (std::size_t a = 0; a < layout.size(); ++a) {
    const auto& plus = layout[a];
    if (plus.chirality != +1) continue;
    for (const auto& minus : layout) {
      if (minus.summand != plus.summand || minus.chirality != -1) continue;
      const ModeIndex plus_idx = index_modes(plus);
      for (std::size_t k = 0; k < minus.modes.size(); ++k) {
        const auto& mode = minus.modes[k];
        const auto it = plus_idx.find({mode.l.twice, mode.m.twice});
        if (it == plus_idx.end()) continue;
        const Eigen::Index row_minus = minus.offset + static_cast<Eigen::Index>(k);
        const double up = eth_coefficient(plus.weight, mode.l, Ladder::raise, radius);
        const double down = eth_coefficient(minus.weight, mode.l, Ladder::lower, radius);
        if (up != 0.0) out.emplace_back(row_minus, it->second, kI * up);
        if (down != 0.0) out.emplace_back(it->second, row_minus, kI * down);
      }
    }
  }
}

SparseMatrixC from_triplets(Eigen::Index n, const std::vector<Triplet>& t) {
  SparseMatrixC m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

}  // namespace

const char* to_string(Backend b) {
  switch (b) {
    case Backend::sphere_spectral:
      return "sphere_spectral";
    case Backend::sphere_complex:
      return "sphere_complex";
    case Backend::torus_lattice:
      return "torus_lattice";
    case Backend::circle_fourier:
      return "circle_fourier";
  }
  return "unknown";
}

Eigen::Index OperatorMatrix::plus_dimension() const {
  return grading ? static_cast<Eigen::Index>((grading->array() > 0).count()) : 0;
}

Eigen::Index OperatorMatrix::minus_dimension() const {
  return grading ? static_cast<Eigen::Index>((grading->array() < 0).count()) : 0;
}

double hermiticity_defect(const OperatorMatrix& op) {
  const SparseMatrixC adj = op.matrix.adjoint();
  const SparseMatrixC diff = op.matrix - adj;
  double worst = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k) {
    for (SparseMatrixC::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

double chirality_defect(const OperatorMatrix& op) {
  if (!op.grading) return 0.0;
  const auto& g = *op.grading;
  double worst = 0.0;
  for (int k = 0; k < op.matrix.outerSize(); ++k) {
    for (SparseMatrixC::InnerIterator it(op.matrix, k); it; ++it) {
      // (Gamma M + M Gamma)_{ij} = (g_i + g_j) M_ij
      worst = std::max(worst, std::abs((g(it.row()) + g(it.col())) * it.value()));
    }
  }
  return worst;
}

std::vector<SphereComponent> sphere_layout(const ConnectionSpec& conn, const SphereBasis& basis) {
  if (!conn.base().is<Sphere>()) throw DomainError("sphere assembly needs a sphere base");
  if (std::abs(conn.base().as<Sphere>().radius - basis.radius()) > 1e-15 * basis.radius()) {
    throw DomainError("basis radius differs from the sphere radius");
  }
  const auto degrees = sphere_degrees(conn);
  std::vector<SphereComponent> layout;
  Eigen::Index offset = 0;
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    const int q = degrees[i];
    for (int chir : {+1, -1}) {
      const HalfInt w = HalfInt::from_twice(chir > 0 ? q - 1 : q + 1);
      if (!basis.has_weight(w)) {
        throw TruncationError("charge " + std::to_string(q) + " needs spin weight " + w.str() +
                              ", absent from the basis");
      }
      SphereComponent c{static_cast<int>(i), chir, w, offset, basis.modes(w)};
      offset += static_cast<Eigen::Index>(c.modes.size());
      layout.push_back(std::move(c));
    }
  }
  return layout;
}

FamilyEndpoints assemble_family_endpoints(const ModelManifold& sphere, const SphereBasis& basis) {
  const auto family = stabilized_family(1.0, sphere);
  const auto layout = sphere_layout(family, basis);
  const Eigen::Index n = layout_size(layout);
  const double r = basis.radius();

  std::vector<Triplet> split;
  add_ladder_blocks(layout, r, split);

  // Clifford multiplication by the second fundamental form couples
  // S^+ (x) H and S^- (x) H^{-1}, the two weight-0 components. As a
  // spin-weighted function the coupling is the constant sqrt(2)|beta|,
  // i.e. its only harmonic component is Y_00 with coefficient
  // sqrt(4 pi) sqrt(2) |beta|.
  const double beta = tautological_second_fundamental_form(r, 0.5 * std::numbers::pi);
  const double amplitude = std::sqrt(4.0 * std::numbers::pi) * std::sqrt(2.0) * beta;
  const SphereMode y00{HalfInt{0}, HalfInt{0}, HalfInt{0}};
  const SphereComponent* from = nullptr;
  const SphereComponent* to = nullptr;
  for (const auto& c : layout) {
    if (c.summand == 0 && c.chirality == +1) from = &c;
    if (c.summand == 1 && c.chirality == -1) to = &c;
  }
  std::vector<Triplet> coupling;
  for (std::size_t i = 0; i < to->modes.size(); ++i) {
    for (std::size_t j = 0; j < from->modes.size(); ++j) {
      const auto& a = to->modes[i];
      const auto& b = from->modes[j];
      if (a.l != b.l || a.m != b.m) continue;  // Y_00 selection rule
      const cd v = kI * amplitude * matrix_element(a, y00, b);
      if (v == cd(0.0)) continue;
      const Eigen::Index row = to->offset + static_cast<Eigen::Index>(i);
      const Eigen::Index col = from->offset + static_cast<Eigen::Index>(j);
      coupling.emplace_back(row, col, v);
      coupling.emplace_back(col, row, std::conj(v));
    }
  }

  OperatorMatrix a1;
  a1.matrix = from_triplets(n, split);
  a1.grading = grading_of(layout, n);
  a1.backend = Backend::sphere_spectral;
  a1.truncation = sphere_truncation(basis);
  a1.provenance = family.describe();

  OperatorMatrix a0 = a1;
  a0.matrix = a1.matrix + from_triplets(n, coupling);
  a0.matrix.makeCompressed();
  a0.provenance = stabilized_family(0.0, sphere).describe();
  return {std::move(a0), std::move(a1)};
}

OperatorMatrix interpolate_family(const FamilyEndpoints& ends, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("family parameter t must lie in [0, 1]");
  OperatorMatrix out = ends.a0;
  const SparseMatrixC delta = ends.a1.matrix - ends.a0.matrix;
  out.matrix = ends.a0.matrix + t * delta;
  out.matrix.prune(cd(0.0), 0.0);
  out.matrix.makeCompressed();
  std::ostringstream os;
  os << "interpolated(t=" << t << ")";
  out.provenance = os.str();
  return out;
}

OperatorMatrix assemble_sphere(const ConnectionSpec& conn, const SphereBasis& basis) {
  if (conn.is<Interpolated>()) {
    const auto ends = assemble_family_endpoints(conn.base(), basis);
    auto op = interpolate_family(ends, conn.as<Interpolated>().t);
    op.provenance = conn.describe();
    return op;
  }
  const auto layout = sphere_layout(conn, basis);
  const Eigen::Index n = layout_size(layout);
  std::vector<Triplet> t;
  add_ladder_blocks(layout, basis.radius(), t);
  OperatorMatrix op;
  op.matrix = from_triplets(n, t);
  op.grading = grading_of(layout, n);
  op.backend = Backend::sphere_spectral;
  op.truncation = sphere_truncation(basis);
  op.provenance = conn.describe();
  return op;
}

OperatorMatrix assemble_sphere_complex(int degree_l, const SphereBasis& basis) {
  // L has spin weight d/2 and L (x) Lambda^{0,1} has weight d/2 + 1.
  const HalfInt w_l = HalfInt::from_twice(degree_l);
  const HalfInt w_form = HalfInt::from_twice(degree_l + 2);
  if (!basis.has_weight(w_l) || !basis.has_weight(w_form)) {
    throw TruncationError("complex Dirac on degree " + std::to_string(degree_l) +
                          " needs spin weights " + w_l.str() + " and " + w_form.str());
  }
  const auto sections = basis.modes(w_l);
  const auto forms = basis.modes(w_form);
  const auto n_sec = static_cast<Eigen::Index>(sections.size());
  const Eigen::Index n = n_sec + static_cast<Eigen::Index>(forms.size());
  std::map<std::pair<int, int>, Eigen::Index> sec_idx;
  for (std::size_t k = 0; k < sections.size(); ++k) {
    sec_idx[{sections[k].l.twice, sections[k].m.twice}] = static_cast<Eigen::Index>(k);
  }
  std::vector<Triplet> t;
  const double r = basis.radius();
  for (std::size_t k = 0; k < forms.size(); ++k) {
    const auto it = sec_idx.find({forms[k].l.twice, forms[k].m.twice});
    if (it == sec_idx.end()) continue;
    // sqrt(2) dbar on sY_{lm} of a degree-d bundle: sqrt((l - d/2)(l + d/2 + 1)) / r.
    const int l2 = forms[k].l.twice;
    const double c = std::sqrt(static_cast<double>(l2 - degree_l) * (l2 + degree_l + 2)) / (2.0 * r);
    if (c == 0.0) continue;
    const Eigen::Index row = n_sec + static_cast<Eigen::Index>(k);
    t.emplace_back(row, it->second, kI * c);
    t.emplace_back(it->second, row, -kI * c);
  }
  OperatorMatrix op;
  op.matrix = from_triplets(n, t);
  Eigen::VectorXd g(n);
  g.head(n_sec).setConstant(1.0);
  g.tail(n - n_sec).setConstant(-1.0);
  op.grading = g;
  op.backend = Backend::sphere_complex;
  op.truncation = sphere_truncation(basis);
  op.provenance = "complex_dirac(deg L=" + std::to_string(degree_l) + ")";
  return op;
}

OperatorMatrix assemble_sphere_spinor_laplacian(const ConnectionSpec& conn, const SphereBasis& basis) {
  if (conn.is<Interpolated>()) {
    throw DomainError("spinor Laplacian is assembled for constant-curvature twists only");
  }
  const auto layout = sphere_layout(conn, basis);
  const Eigen::Index n = layout_size(layout);
  const double r = basis.radius();
  std::vector<Triplet> t;
  for (const auto& c : layout) {
    for (std::size_t k = 0; k < c.modes.size(); ++k) {
      const int l2 = c.modes[k].l.twice, s2 = c.weight.twice;
      // l(l+1) - s^2 in doubled units.
      const double v = (static_cast<double>(l2) * (l2 + 2) - static_cast<double>(s2) * s2) / (4.0 * r * r);
      const Eigen::Index i = c.offset + static_cast<Eigen::Index>(k);
      t.emplace_back(i, i, v);
    }
  }
  OperatorMatrix op;
  op.matrix = from_triplets(n, t);
  op.grading = grading_of(layout, n);
  op.backend = Backend::sphere_spectral;
  op.truncation = sphere_truncation(basis);
  op.provenance = "spinor_laplacian " + conn.describe();
  return op;
}

SparseMatrixC wilson_dirac(const TorusLattice& lat) {
  const Eigen::Index sites = static_cast<Eigen::Index>(lat.n1) * lat.n2;
  const Eigen::Index n = 2 * sites;
  // gamma_1 = sigma_1, gamma_2 = sigma_2
  Eigen::Matrix2cd gamma[2];
  gamma[0] << 0, 1, 1, 0;
  gamma[1] << 0, -kI, kI, 0;
  const double a[2] = {lat.spacing1(), lat.spacing2()};
  const double bc[2] = {lat.torus.spin[0] == CycleSpin::antiperiodic ? -1.0 : 1.0,
                        lat.torus.spin[1] == CycleSpin::antiperiodic ? -1.0 : 1.0};
  const double r = lat.wilson;

  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(n) * 9);
  for (int x2 = 0; x2 < lat.n2; ++x2) {
    for (int x1 = 0; x1 < lat.n1; ++x1) {
      const Eigen::Index x = lat.site(x1, x2);
      for (int s = 0; s < 2; ++s) t.emplace_back(2 * x + s, 2 * x + s, r / a[0] + r / a[1]);
      for (int mu = 0; mu < 2; ++mu) {
        const bool wraps = mu == 0 ? (x1 == lat.n1 - 1) : (x2 == lat.n2 - 1);
        const Eigen::Index y = mu == 0 ? lat.site(x1 + 1, x2) : lat.site(x1, x2 + 1);
        const cd u = (mu == 0 ? lat.link1[x] : lat.link2[x]) * (wraps ? bc[mu] : 1.0);
        // forward:  (gamma U psi(x+mu) - r U psi(x+mu)) / 2a
        // backward: (-gamma U^* psi(x) - r U^* psi(x)) / 2a seen from y
        for (int s = 0; s < 2; ++s) {
          for (int s2 = 0; s2 < 2; ++s2) {
            const cd g = gamma[mu](s, s2);
            const cd wil = (s == s2) ? cd(r) : cd(0.0);
            const cd fwd = (g - wil) * u / (2.0 * a[mu]);
            const cd bwd = (-g - wil) * std::conj(u) / (2.0 * a[mu]);
            if (fwd != cd(0.0)) t.emplace_back(2 * x + s, 2 * y + s2, fwd);
            if (bwd != cd(0.0)) t.emplace_back(2 * y + s, 2 * x + s2, bwd);
          }
        }
      }
    }
  }
  return from_triplets(n, t);
}

OperatorMatrix assemble_torus_lattice(const ConnectionSpec& conn, const TorusLattice& lattice) {
  if (!conn.base().is<FlatTorus>()) throw DomainError("lattice assembly needs a flat torus base");
  int copies = 1;
  int degree = 0;
  if (conn.is<ConstantCurvature>()) {
    const auto& d = conn.as<ConstantCurvature>().degrees;
    if (d.size() != 1) throw DomainError("lattice backend supports rank-1 constant-curvature twists");
    degree = d.front();
  } else if (conn.is<TrivialFrame>()) {
    copies = conn.as<TrivialFrame>().rank;
  } else {
    throw DomainError("lattice backend supports constant-curvature and trivial-frame twists");
  }
  const auto& tor = conn.base().as<FlatTorus>();
  if (std::abs(tor.length1 - lattice.torus.length1) > 1e-12 * tor.length1 ||
      std::abs(tor.length2 - lattice.torus.length2) > 1e-12 * tor.length2) {
    throw DomainError("lattice geometry differs from the connection's torus");
  }
  const std::size_t sites = static_cast<std::size_t>(lattice.n1) * lattice.n2;
  if (lattice.link1.size() != sites || lattice.link2.size() != sites) {
    throw FluxError("link field size does not match the lattice");
  }
  const double plaquette = 2.0 * std::numbers::pi * degree / static_cast<double>(sites);
  for (int x2 = 0; x2 < lattice.n2; ++x2) {
    for (int x1 = 0; x1 < lattice.n1; ++x1) {
      if (std::abs(lattice.plaquette_angle(x1, x2) - plaquette) > 1e-9) {
        throw FluxError("plaquette (" + std::to_string(x1) + "," + std::to_string(x2) +
                        ") does not carry the constant flux of degree " + std::to_string(degree));
      }
    }
  }
  if (std::abs(lattice.total_flux() - 2.0 * std::numbers::pi * degree) > 1e-8) {
    throw FluxError("total lattice flux is not 2 pi times the degree");
  }

  const SparseMatrixC d = wilson_dirac(lattice);
  const Eigen::Index m = d.rows();
  const Eigen::Index block = 2 * m;
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(d.nonZeros()) * 2 * copies);
  for (int c = 0; c < copies; ++c) {
    const Eigen::Index off = c * block;
    for (int k = 0; k < d.outerSize(); ++k) {
      for (SparseMatrixC::InnerIterator it(d, k); it; ++it) {
        t.emplace_back(off + m + it.row(), off + it.col(), it.value());
        t.emplace_back(off + it.col(), off + m + it.row(), std::conj(it.value()));
      }
    }
  }
  OperatorMatrix op;
  op.matrix = from_triplets(block * copies, t);
  Eigen::VectorXd g(block * copies);
  for (int c = 0; c < copies; ++c) {
    g.segment(c * block, m).setConstant(1.0);
    g.segment(c * block + m, m).setConstant(-1.0);
  }
  op.grading = g;
  op.backend = Backend::torus_lattice;
  op.truncation = "N1=" + std::to_string(lattice.n1) + ",N2=" + std::to_string(lattice.n2) +
                  ",r_w=" + std::to_string(lattice.wilson);
  op.provenance = conn.describe();
  op.hermitization_multiplicity = 2;
  return op;
}

OperatorMatrix assemble_circle(const CircleBasis& basis) {
  if (basis.k_max < 1) throw DomainError("circle truncation k_max must be at least 1");
  if (!(basis.length > 0.0)) throw DomainError("circle length must be positive");
  const Eigen::Index n = 2 * basis.k_max + 1;
  std::vector<Triplet> t;
  for (int k = -basis.k_max; k <= basis.k_max; ++k) {
    t.emplace_back(k + basis.k_max, k + basis.k_max,
                   2.0 * std::numbers::pi * (k + basis.offset()) / basis.length);
  }
  OperatorMatrix op;
  op.matrix = from_triplets(n, t);
  op.backend = Backend::circle_fourier;
  op.truncation = "k_max=" + std::to_string(basis.k_max);
  op.provenance = std::string("circle(") + to_string(basis.spin) + ")";
  return op;
}

}  // namespace diraclab
