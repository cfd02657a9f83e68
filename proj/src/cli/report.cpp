#include "diraclab/cli/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "diraclab/errors.hpp"

namespace diraclab {

using nlohmann::json;

namespace {

template <class T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
  j[key] = v ? json(*v) : json(nullptr);
}

template <class T>
void get_optional(const json& j, const char* key, std::optional<T>& v) {
  if (j.contains(key) && !j.at(key).is_null()) {
    v = j.at(key).get<T>();
  } else {
    v.reset();
  }
}

}  // namespace

void to_json(json& j, const Cluster& c) { j = json{{"value", c.value}, {"multiplicity", c.multiplicity}}; }
void from_json(const json& j, Cluster& c) {
  j.at("value").get_to(c.value);
  j.at("multiplicity").get_to(c.multiplicity);
}

void to_json(json& j, const SolverDiagnostics& d) {
  j = json{{"method", d.method},
           {"iterations", d.iterations},
           {"max_residual", d.max_residual},
           {"residual_target", d.residual_target},
           {"matrix_norm", d.matrix_norm}};
}
void from_json(const json& j, SolverDiagnostics& d) {
  j.at("method").get_to(d.method);
  j.at("iterations").get_to(d.iterations);
  j.at("max_residual").get_to(d.max_residual);
  j.at("residual_target").get_to(d.residual_target);
  j.at("matrix_norm").get_to(d.matrix_norm);
}

void to_json(json& j, const SpectrumResult& s) {
  j = json{{"eigenvalues", s.eigenvalues},
           {"clusters", s.clusters},
           {"chirality", s.chirality},
           {"kernel_chirality", s.kernel_chirality},
           {"graded", s.graded},
           {"zero_threshold", s.zero_threshold},
           {"cluster_tolerance", s.cluster_tolerance},
           {"hermitization_multiplicity", s.hermitization_multiplicity},
           {"rank_multiplier", s.rank_multiplier},
           {"diagnostics", s.diagnostics}};
}
void from_json(const json& j, SpectrumResult& s) {
  j.at("eigenvalues").get_to(s.eigenvalues);
  j.at("clusters").get_to(s.clusters);
  j.at("chirality").get_to(s.chirality);
  j.at("kernel_chirality").get_to(s.kernel_chirality);
  j.at("graded").get_to(s.graded);
  j.at("zero_threshold").get_to(s.zero_threshold);
  j.at("cluster_tolerance").get_to(s.cluster_tolerance);
  j.at("hermitization_multiplicity").get_to(s.hermitization_multiplicity);
  j.at("rank_multiplier").get_to(s.rank_multiplier);
  j.at("diagnostics").get_to(s.diagnostics);
}

void to_json(json& j, const BoundInputs& b) {
  j = json::object();
  put_optional(j, "R0", b.R0);
  put_optional(j, "n", b.n);
  put_optional(j, "k", b.k);
  put_optional(j, "deg", b.deg);
  put_optional(j, "rk", b.rk);
  put_optional(j, "vol", b.vol);
  put_optional(j, "g", b.g);
}
void from_json(const json& j, BoundInputs& b) {
  get_optional(j, "R0", b.R0);
  get_optional(j, "n", b.n);
  get_optional(j, "k", b.k);
  get_optional(j, "deg", b.deg);
  get_optional(j, "rk", b.rk);
  get_optional(j, "vol", b.vol);
  get_optional(j, "g", b.g);
}

void to_json(json& j, const BoundReport& b) {
  j = json{{"bound_name", b.bound_name},
           {"bound_value", b.bound_value},
           {"observed_min_lambda_sq", b.observed_min_lambda_sq},
           {"atol", b.atol},
           {"satisfied", b.satisfied},
           {"attained", b.attained},
           {"applicable", b.applicable},
           {"applicability", b.applicability},
           {"inputs", b.inputs}};
}
void from_json(const json& j, BoundReport& b) {
  j.at("bound_name").get_to(b.bound_name);
  j.at("bound_value").get_to(b.bound_value);
  j.at("observed_min_lambda_sq").get_to(b.observed_min_lambda_sq);
  j.at("atol").get_to(b.atol);
  j.at("satisfied").get_to(b.satisfied);
  j.at("attained").get_to(b.attained);
  j.at("applicable").get_to(b.applicable);
  j.at("applicability").get_to(b.applicability);
  j.at("inputs").get_to(b.inputs);
}

void to_json(json& j, const IndexReport& r) {
  j = json{{"topological_index", r.topological_index},
           {"analytic_index", r.analytic_index},
           {"degree_used", r.degree_used},
           {"sign_convention", r.sign_convention},
           {"kernel_dimension", r.kernel_dimension},
           {"match", r.match}};
}
void from_json(const json& j, IndexReport& r) {
  j.at("topological_index").get_to(r.topological_index);
  j.at("analytic_index").get_to(r.analytic_index);
  j.at("degree_used").get_to(r.degree_used);
  j.at("sign_convention").get_to(r.sign_convention);
  j.at("kernel_dimension").get_to(r.kernel_dimension);
  j.at("match").get_to(r.match);
}

void to_json(json& j, const FlowResult& f) {
  j = json{{"t_grid", f.t_grid},
           {"magnitudes", f.magnitudes},
           {"lambda_min", f.lambda_min},
           {"perturbation_norm", f.perturbation_norm},
           {"zero_threshold", f.zero_threshold},
           {"atol", f.atol},
           {"eps", f.eps},
           {"lipschitz_ok", f.lipschitz_ok},
           {"kernel_dimension_at_one", f.kernel_dimension_at_one},
           {"first_nonzero_at_one", f.first_nonzero_at_one}};
  put_optional(j, "t_epsilon", f.t_epsilon);
}
void from_json(const json& j, FlowResult& f) {
  j.at("t_grid").get_to(f.t_grid);
  j.at("magnitudes").get_to(f.magnitudes);
  j.at("lambda_min").get_to(f.lambda_min);
  j.at("perturbation_norm").get_to(f.perturbation_norm);
  j.at("zero_threshold").get_to(f.zero_threshold);
  j.at("atol").get_to(f.atol);
  j.at("eps").get_to(f.eps);
  j.at("lipschitz_ok").get_to(f.lipschitz_ok);
  j.at("kernel_dimension_at_one").get_to(f.kernel_dimension_at_one);
  j.at("first_nonzero_at_one").get_to(f.first_nonzero_at_one);
  get_optional(j, "t_epsilon", f.t_epsilon);
}

}  // namespace diraclab

namespace diraclab::cli {

using nlohmann::json;

void to_json(json& j, const OperatorSummary& o) {
  j = json{{"backend", o.backend},
           {"dimension", o.dimension},
           {"plus_dimension", o.plus_dimension},
           {"minus_dimension", o.minus_dimension},
           {"hermitization_multiplicity", o.hermitization_multiplicity},
           {"truncation", o.truncation},
           {"provenance", o.provenance},
           {"hermiticity_defect", o.hermiticity_defect},
           {"chirality_defect", o.chirality_defect}};
}
void from_json(const json& j, OperatorSummary& o) {
  j.at("backend").get_to(o.backend);
  j.at("dimension").get_to(o.dimension);
  j.at("plus_dimension").get_to(o.plus_dimension);
  j.at("minus_dimension").get_to(o.minus_dimension);
  j.at("hermitization_multiplicity").get_to(o.hermitization_multiplicity);
  j.at("truncation").get_to(o.truncation);
  j.at("provenance").get_to(o.provenance);
  j.at("hermiticity_defect").get_to(o.hermiticity_defect);
  j.at("chirality_defect").get_to(o.chirality_defect);
}

void to_json(json& j, const Verdict& v) {
  j = json{{"verify", v.verify}, {"passed", v.passed}, {"failures", v.failures}};
}
void from_json(const json& j, Verdict& v) {
  j.at("verify").get_to(v.verify);
  j.at("passed").get_to(v.passed);
  j.at("failures").get_to(v.failures);
}

void to_json(json& j, const RunReport& r) {
  j = json{{"schema_version", r.schema_version},
           {"artifact_version", r.artifact_version},
           {"experiment", r.experiment},
           {"config", r.config},
           {"operators", r.operators},
           {"bounds", r.bounds},
           {"verdict", r.verdict}};
  auto opt = [&](const char* key, const auto& v) {
    if (v) j[key] = *v;
  };
  opt("spectrum", r.spectrum);
  opt("base_spectrum", r.base_spectrum);
  opt("circle_spectrum", r.circle_spectrum);
  opt("index", r.index);
  opt("flow", r.flow);
}

void from_json(const json& j, RunReport& r) {
  j.at("schema_version").get_to(r.schema_version);
  j.at("artifact_version").get_to(r.artifact_version);
  j.at("experiment").get_to(r.experiment);
  r.config = j.at("config");
  j.at("operators").get_to(r.operators);
  j.at("bounds").get_to(r.bounds);
  j.at("verdict").get_to(r.verdict);
  auto opt = [&](const char* key, auto& v) {
    if (j.contains(key)) {
      v = j.at(key).get<typename std::remove_reference_t<decltype(v)>::value_type>();
    } else {
      v.reset();
    }
  };
  opt("spectrum", r.spectrum);
  opt("base_spectrum", r.base_spectrum);
  opt("circle_spectrum", r.circle_spectrum);
  opt("index", r.index);
  opt("flow", r.flow);
}

OperatorSummary summarize(const OperatorMatrix& op) {
  OperatorSummary s;
  s.backend = to_string(op.backend);
  s.dimension = static_cast<long>(op.dimension());
  s.plus_dimension = static_cast<long>(op.plus_dimension());
  s.minus_dimension = static_cast<long>(op.minus_dimension());
  s.hermitization_multiplicity = op.hermitization_multiplicity;
  s.truncation = op.truncation;
  s.provenance = op.provenance;
  s.hermiticity_defect = hermiticity_defect(op);
  s.chirality_defect = chirality_defect(op);
  return s;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string spectrum_csv(const SpectrumResult& s) {
  std::ostringstream os;
  os << "index,eigenvalue,multiplicity,chirality\n";
  for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) {
    const double v = s.eigenvalues[i];
    // Multiplicity of the cluster holding this value.
    int mult = 1;
    double best = INFINITY;
    for (const auto& c : s.clusters) {
      const double d = std::abs(c.value - v);
      if (d < best) {
        best = d;
        mult = c.multiplicity;
      }
    }
    os << i << ',' << format_double(v) << ',' << mult << ',' << (i < s.chirality.size() ? s.chirality[i] : 0)
       << '\n';
  }
  return os.str();
}

std::string bounds_csv(const std::vector<BoundReport>& b) {
  std::ostringstream os;
  os << "name,value,observed,satisfied,attained\n";
  for (const auto& r : b) {
    os << r.bound_name << ',' << format_double(r.bound_value) << ',' << format_double(r.observed_min_lambda_sq)
       << ',' << (r.satisfied ? "true" : "false") << ',' << (r.attained ? "true" : "false") << '\n';
  }
  return os.str();
}

std::string flow_csv(const FlowResult& f) {
  std::size_t k = 0;
  for (const auto& m : f.magnitudes) k = std::max(k, m.size());
  std::ostringstream os;
  os << "t,lambda_min";
  for (std::size_t j = 1; j <= k; ++j) os << ",lambda_" << j;
  os << '\n';
  for (std::size_t i = 0; i < f.t_grid.size(); ++i) {
    os << format_double(f.t_grid[i]) << ',' << format_double(f.lambda_min[i]);
    for (std::size_t j = 0; j < k; ++j) {
      os << ',';
      if (j < f.magnitudes[i].size()) os << format_double(f.magnitudes[i][j]);
    }
    os << '\n';
  }
  return os.str();
}

json operator_dump(const OperatorMatrix& op) {
  json triplets = json::array();
  for (int k = 0; k < op.matrix.outerSize(); ++k) {
    for (SparseMatrixC::InnerIterator it(op.matrix, k); it; ++it) {
      triplets.push_back(json::array({it.row(), it.col(), it.value().real(), it.value().imag()}));
    }
  }
  json grading = nullptr;
  if (op.grading) {
    grading = json::array();
    for (Eigen::Index i = 0; i < op.grading->size(); ++i) grading.push_back(static_cast<int>((*op.grading)(i)));
  }
  return json{{"rows", op.matrix.rows()},
              {"cols", op.matrix.cols()},
              {"backend", to_string(op.backend)},
              {"truncation", op.truncation},
              {"provenance", op.provenance},
              {"hermitization_multiplicity", op.hermitization_multiplicity},
              {"grading", grading},
              {"triplets", triplets}};
}

std::string flow_svg(const FlowResult& f) {
  const double w = 640, h = 400, ml = 60, mr = 20, mt = 20, mb = 50;
  double ymax = 0.0;
  for (const auto& m : f.magnitudes) {
    for (double v : m) ymax = std::max(ymax, v);
  }
  if (ymax <= 0.0) ymax = 1.0;
  const auto x = [&](double t) { return ml + t * (w - ml - mr); };
  const auto y = [&](double v) { return h - mb - v / ymax * (h - mt - mb); };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
     << ' ' << h << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\"" << h - mb
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << h - mb
     << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"" << h - 10 << "\" text-anchor=\"middle\" font-size=\"14\">t</text>\n";
  os << "<text x=\"15\" y=\"" << h / 2 << "\" font-size=\"14\" transform=\"rotate(-90 15 " << h / 2
     << ")\" text-anchor=\"middle\">|lambda|</text>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double t = tick / 4.0, v = ymax * tick / 4.0;
    os << "<text x=\"" << x(t) << "\" y=\"" << h - mb + 18 << "\" text-anchor=\"middle\" font-size=\"11\">"
       << format_double(t) << "</text>\n";
    char label[32];
    std::snprintf(label, sizeof label, "%.3g", v);
    os << "<text x=\"" << ml - 6 << "\" y=\"" << y(v) + 4 << "\" text-anchor=\"end\" font-size=\"11\">" << label
       << "</text>\n";
  }
  std::size_t k = 0;
  for (const auto& m : f.magnitudes) k = std::max(k, m.size());
  for (std::size_t j = 0; j < k; ++j) {
    os << "<polyline fill=\"none\" stroke=\"" << (j == 0 ? "#c0392b" : "#7f8c8d") << "\" stroke-width=\""
       << (j == 0 ? 2 : 1) << "\" points=\"";
    for (std::size_t i = 0; i < f.t_grid.size(); ++i) {
      if (j < f.magnitudes[i].size()) os << x(f.t_grid[i]) << ',' << y(f.magnitudes[i][j]) << ' ';
    }
    os << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) {
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw IoError(path + ": cannot create directory: " + ec.message());
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(tmp.string() + ": cannot open for writing");
    out << contents;
    out.flush();
    if (!out) throw IoError(tmp.string() + ": write failed");
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError(path + ": rename failed");
  }
}

}  // namespace diraclab::cli
