#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "diraclab/bounds.hpp"
#include "diraclab/flow.hpp"
#include "diraclab/index.hpp"
#include "diraclab/spectrum.hpp"

namespace diraclab {

void to_json(nlohmann::json& j, const Cluster& c);
void from_json(const nlohmann::json& j, Cluster& c);
void to_json(nlohmann::json& j, const SolverDiagnostics& d);
void from_json(const nlohmann::json& j, SolverDiagnostics& d);
void to_json(nlohmann::json& j, const SpectrumResult& s);
void from_json(const nlohmann::json& j, SpectrumResult& s);
void to_json(nlohmann::json& j, const BoundInputs& b);
void from_json(const nlohmann::json& j, BoundInputs& b);
void to_json(nlohmann::json& j, const BoundReport& b);
void from_json(const nlohmann::json& j, BoundReport& b);
void to_json(nlohmann::json& j, const IndexReport& r);
void from_json(const nlohmann::json& j, IndexReport& r);
void to_json(nlohmann::json& j, const FlowResult& f);
void from_json(const nlohmann::json& j, FlowResult& f);

}  // namespace diraclab

namespace diraclab::cli {

struct OperatorSummary {
  std::string backend;
  long dimension = 0;
  long plus_dimension = 0;
  long minus_dimension = 0;
  int hermitization_multiplicity = 1;
  std::string truncation;
  std::string provenance;
  double hermiticity_defect = 0.0;
  double chirality_defect = 0.0;
};

struct Verdict {
  bool verify = false;
  bool passed = true;
  std::vector<std::string> failures;
};

/// Everything a run produces except wall-clock timings, which go to a
/// separate sidecar so that reports are byte-identical across re-runs.
struct RunReport {
  int schema_version = 1;
  std::string artifact_version;
  std::string experiment;
  nlohmann::json config;
  std::vector<OperatorSummary> operators;
  std::optional<SpectrumResult> spectrum;
  std::optional<SpectrumResult> base_spectrum;
  std::optional<SpectrumResult> circle_spectrum;
  std::vector<BoundReport> bounds;
  std::optional<IndexReport> index;
  std::optional<FlowResult> flow;
  Verdict verdict;
};

void to_json(nlohmann::json& j, const OperatorSummary& o);
void from_json(const nlohmann::json& j, OperatorSummary& o);
void to_json(nlohmann::json& j, const Verdict& v);
void from_json(const nlohmann::json& j, Verdict& v);
void to_json(nlohmann::json& j, const RunReport& r);
void from_json(const nlohmann::json& j, RunReport& r);

OperatorSummary summarize(const OperatorMatrix& op);

/// Doubles printed with 17 significant digits.
std::string format_double(double v);

std::string spectrum_csv(const SpectrumResult& s);
std::string bounds_csv(const std::vector<BoundReport>& b);
std::string flow_csv(const FlowResult& f);
/// Sparse triplet dump: {"rows", "cols", "backend", "grading", "triplets": [[i, j, re, im], ...]}.
nlohmann::json operator_dump(const OperatorMatrix& op);
/// Line plot of lambda_min(t) and the other tracked magnitudes.
std::string flow_svg(const FlowResult& f);

/// Writes `contents` to `path` through a temporary file in the same
/// directory followed by a rename. Throws IoError.
void write_atomic(const std::string& path, const std::string& contents);

}  // namespace diraclab::cli
