#include "diraclab/cli/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "diraclab/closed_form.hpp"
#include "diraclab/errors.hpp"

namespace diraclab::cli {

using nlohmann::json;

namespace {

int level_rank(const std::string& level) {
  if (level == "error") return 0;
  if (level == "warn") return 1;
  if (level == "info") return 2;
  if (level == "debug") return 3;
  return 1;
}

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

std::vector<int> sphere_charges(const ConnectionSpec& conn) {
  if (conn.is<ConstantCurvature>()) return conn.as<ConstantCurvature>().degrees;
  if (conn.is<Interpolated>()) return {+1, -1};
  return {0};
}

ModelManifold product_base(const ModelManifold& m) {
  return std::visit(
      [](const auto& b) -> ModelManifold {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, Circle>) {
          return ModelManifold::circle(b.length, b.spin);
        } else if constexpr (std::is_same_v<T, Sphere>) {
          return ModelManifold::sphere(b.radius);
        } else {
          return ModelManifold::flat_torus(b.length1, b.length2, b.spin);
        }
      },
      m.as<ProductWithCircle>().base);
}

// Chirality of the lattice continuum limit: sigma_3 on the spinor index in
// both blocks of the Hermitization. Each continuum kernel mode then shows up
// once per block with the same chirality.
OperatorMatrix with_lattice_chirality(OperatorMatrix op) {
  Eigen::VectorXd g(op.dimension());
  for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = (i % 2 == 0) ? 1.0 : -1.0;
  op.grading = g;
  return op;
}

}  // namespace

void log(const char* level, const std::string& message) {
  static const int threshold = [] {
    const char* env = std::getenv("DIRACLAB_LOG");
    return env ? level_rank(env) : 1;
  }();
  if (level_rank(level) <= threshold) std::cerr << "[diraclab " << level << "] " << message << '\n';
}

BuiltOperator build_operator(const ExperimentConfig& config, const ModelManifold& base, const ConnectionSpec& conn) {
  BuiltOperator b;
  const auto& be = config.backend;
  try {
    switch (be.type) {
      case Backend::sphere_spectral: {
        if (!base.is<Sphere>()) throw ConfigError("sphere_spectral backend needs a sphere");
        const auto basis = SphereBasis::for_degrees(be.l_max, sphere_charges(conn), base.as<Sphere>().radius);
        b.op = assemble_sphere(conn, basis);
        break;
      }
      case Backend::torus_lattice: {
        if (!base.is<FlatTorus>()) throw ConfigError("torus_lattice backend needs a flat torus");
        int degree = 0;
        if (conn.is<ConstantCurvature>()) {
          const auto& d = conn.as<ConstantCurvature>().degrees;
          if (d.size() != 1) throw ConfigError("torus_lattice supports rank-1 constant-curvature connections");
          degree = d.front();
        }
        const auto lattice = TorusLattice::build(base.as<FlatTorus>(), degree, be.n1, be.n2, be.wilson);
        b.op = assemble_torus_lattice(conn, lattice);
        break;
      }
      case Backend::circle_fourier: {
        if (!base.is<Circle>()) throw ConfigError("circle_fourier backend needs a circle");
        if (!conn.is<TrivialFrame>() || conn.as<TrivialFrame>().rank != 1) {
          throw ConfigError("circle_fourier supports the untwisted operator only");
        }
        b.op = assemble_circle(CircleBasis::for_circle(base.as<Circle>(), be.k_max));
        break;
      }
      case Backend::sphere_complex:
        throw ConfigError("sphere_complex is not selectable from a config");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  } catch (const TruncationError& e) {
    throw ConfigError(e.what());
  }

  b.solver = default_solver_options(b.op);
  const auto& s = config.solver;
  b.solver.count = s.count;
  b.solver.method = s.method;
  if (b.op.backend == Backend::torus_lattice) {
    b.solver.zero_threshold = 0.5 * predicted_first_nonzero(conn);
  }
  if (s.zero_threshold) b.solver.zero_threshold = *s.zero_threshold;
  if (s.cluster_tolerance) {
    b.solver.cluster_tolerance = *s.cluster_tolerance;
    b.solver.cluster_gap_fraction = 0.0;
  }
  if (s.residual_tolerance) b.solver.residual_tolerance = *s.residual_tolerance;
  if (b.solver.count > b.op.dimension()) {
    throw ConfigError("solver.count " + std::to_string(b.solver.count) + " exceeds the operator dimension " +
                      std::to_string(b.op.dimension()));
  }
  return b;
}

RunResult run(const ExperimentConfig& config, const RunOptions& options, const std::string& version) {
  RunResult out;
  RunReport& r = out.report;
  r.schema_version = config.schema_version;
  r.artifact_version = version;
  r.experiment = to_string(config.experiment);
  r.config = config.raw;
  r.verdict.verify = options.verify;
  const auto fail = [&](const std::string& why) {
    r.verdict.passed = false;
    r.verdict.failures.push_back(why);
  };

  Stopwatch clock;
  const auto m = config.manifold();
  log("info", "experiment " + r.experiment + " on " + m.name());

  if (config.experiment == Experiment::flow) {
    if (config.connection && config.connection->type != "interpolated") {
      throw ConfigError("flow experiments sweep the interpolated family; drop the connection record");
    }
    if (config.backend.type != Backend::sphere_spectral) throw ConfigError("flow experiments use sphere_spectral");
    const auto basis = SphereBasis::for_degrees(config.backend.l_max, {+1, -1}, m.as<Sphere>().radius);
    const auto grid = config.flow.grid.empty() ? default_flow_grid(config.flow.levels) : config.flow.grid;
    FlowOptions fo;
    fo.threads = options.threads;
    fo.atol = config.flow.atol;
    if (config.solver.zero_threshold) fo.zero_threshold = *config.solver.zero_threshold;
    FlowResult f;
    try {
      f = sweep_family(m, basis, grid, config.flow.k, config.flow.eps, fo);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("flow: ") + e.what());
    }
    out.timings["sweep"] = clock.lap();
    const auto ends = assemble_family_endpoints(m, basis);
    r.operators = {summarize(ends.a0), summarize(ends.a1)};
    if (options.dump_operator) {
      out.dumps["operator_a0.json"] = operator_dump(ends.a0);
      out.dumps["operator_a1.json"] = operator_dump(ends.a1);
    }
    if (!f.lipschitz_ok) fail("Weyl-Lipschitz certificate failed");
    if (!f.t_epsilon) fail("no grid point with 0 < lambda_min < eps");
    if (f.lambda_min.back() > f.zero_threshold) fail("lambda_min(1) is not in the kernel");
    for (std::size_t i = 0; i + 1 < f.t_grid.size(); ++i) {
      if (!(f.lambda_min[i] > f.zero_threshold)) fail("lambda_min vanishes before t = 1");
    }
    r.flow = std::move(f);
    return out;
  }

  if (config.experiment == Experiment::product) {
    const auto base = product_base(m);
    const auto& circle = m.as<ProductWithCircle>().circle;
    const auto conn = config.connection_on(base);
    auto built = build_operator(config, base, conn);
    out.timings["assemble"] = clock.lap();
    const auto base_spec = eigen_smallest(built.op, built.solver);
    const auto circle_op = assemble_circle(CircleBasis::for_circle(circle, config.product.k_max));
    const auto circle_spec =
        eigen_smallest(circle_op, static_cast<int>(circle_op.dimension()), built.solver.zero_threshold);
    auto combined = combine_product_spectrum(base_spec, circle_spec);
    // Keep the part of the product spectrum that neither truncation can
    // have cut off, then the requested count.
    double lam_max = 0.0, beta_max = 0.0;
    for (double v : base_spec.eigenvalues) lam_max = std::max(lam_max, std::abs(v));
    for (double v : circle_spec.eigenvalues) beta_max = std::max(beta_max, std::abs(v));
    const double cutoff = std::min(lam_max, beta_max);
    std::vector<double> kept;
    for (double v : combined.eigenvalues) {
      if (std::abs(v) <= cutoff * (1.0 + 1e-12) && static_cast<int>(kept.size()) < config.solver.count) {
        kept.push_back(v);
      }
    }
    auto reported = spectrum_from_values(kept, combined.zero_threshold, combined.cluster_tolerance);
    reported.rank_multiplier = combined.rank_multiplier;
    reported.hermitization_multiplicity = base_spec.hermitization_multiplicity;
    reported.diagnostics.method = "product";
    out.timings["solve"] = clock.lap();
    r.operators = {summarize(built.op), summarize(circle_op)};
    if (options.dump_operator) out.dumps["operator.json"] = operator_dump(built.op);
    r.base_spectrum = base_spec;
    r.circle_spectrum = circle_spec;
    r.spectrum = std::move(reported);
    return out;
  }

  const auto conn = config.connection_on(m);
  auto built = build_operator(config, m, conn);
  out.timings["assemble"] = clock.lap();
  r.operators = {summarize(built.op)};
  if (options.dump_operator) out.dumps["operator.json"] = operator_dump(built.op);
  const auto spec = eigen_smallest(built.op, built.solver);
  out.timings["solve"] = clock.lap();

  if (config.experiment == Experiment::bounds) {
    const bool lattice = built.op.backend == Backend::torus_lattice;
    const double atol = config.bounds.atol.value_or(lattice ? 5e-2 : 1e-8);
    const bool relative = config.bounds.relative.value_or(lattice);
    r.bounds = surface_bounds(conn, spec, atol, relative);
    for (const auto& b : r.bounds) {
      if (b.applicable && !b.satisfied) fail("bound " + b.bound_name + " violated");
    }
  } else if (config.experiment == Experiment::index) {
    const int topo = topological_index(conn);
    IndexReport ir;
    if (built.op.backend == Backend::torus_lattice) {
      const auto chiral = eigen_smallest(with_lattice_chirality(built.op), built.solver);
      const auto [plus, minus] = zero_mode_count(chiral);
      const int mult = built.op.hermitization_multiplicity;
      ir.degree_used = conn.bundle().total_degree();
      ir.topological_index = topo;
      ir.analytic_index = (plus - minus) / mult;
      ir.kernel_dimension = (plus + minus) / mult;
      ir.match = ir.analytic_index == ir.topological_index;
    } else {
      ir = index_check(conn.bundle(), spec);
    }
    out.timings["index"] = clock.lap();
    if (!ir.match) fail("topological and analytic index differ");
    r.index = ir;
  }
  r.spectrum = spec;
  return out;
}

void emit(const RunResult& result, const RunOptions& options) {
  namespace fs = std::filesystem;
  const fs::path dir(options.out_dir.empty() ? "." : options.out_dir);
  const auto& r = result.report;
  const bool json_out = options.format == "json" || options.format == "both";
  const bool csv_out = options.format == "csv" || options.format == "both";
  if (!json_out && !csv_out) throw ConfigError("format must be json, csv or both");
  if (json_out) write_atomic((dir / "report.json").string(), json(r).dump(2) + "\n");
  if (csv_out) {
    if (r.spectrum) write_atomic((dir / "spectrum.csv").string(), spectrum_csv(*r.spectrum));
    if (r.experiment == "bounds") write_atomic((dir / "bounds.csv").string(), bounds_csv(r.bounds));
    if (r.flow) write_atomic((dir / "flow.csv").string(), flow_csv(*r.flow));
  }
  if (options.plot) {
    if (r.flow) {
      write_atomic((dir / "flow.svg").string(), flow_svg(*r.flow));
    } else {
      log("warn", "--plot applies to flow experiments only");
    }
  }
  for (const auto& [name, doc] : result.dumps) write_atomic((dir / name).string(), doc.dump() + "\n");
  json t = json::object();
  for (const auto& [stage, secs] : result.timings) t[stage] = secs;
  write_atomic((dir / "timings.json").string(), t.dump(2) + "\n");
}

}  // namespace diraclab::cli
