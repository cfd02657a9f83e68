#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "diraclab/assembly.hpp"
#include "diraclab/spectrum.hpp"

namespace diraclab::cli {

inline constexpr int kSchemaVersion = 1;

enum class Experiment { spectrum, bounds, index, flow, product };
const char* to_string(Experiment e);
Experiment experiment_from_string(const std::string& s);

struct ConnectionConfig {
  std::string type = "trivial_frame";
  std::vector<int> degrees;
  int rank = 1;
  double t = 0.0;
};

struct BackendConfig {
  Backend type = Backend::sphere_spectral;
  HalfInt l_max{21};
  int n1 = 32;
  int n2 = 32;
  double wilson = 1.0;
  int k_max = 16;
};

struct SolverConfig {
  int count = 12;
  std::optional<double> zero_threshold;
  std::optional<double> cluster_tolerance;
  std::optional<double> residual_tolerance;
  SolverMethod method = SolverMethod::automatic;
};

struct BoundsConfig {
  std::optional<double> atol;
  std::optional<bool> relative;
};

struct FlowConfig {
  std::vector<double> grid;
  int levels = 8;
  int k = 6;
  double eps = 0.1;
  double atol = 1e-8;
};

struct ProductConfig {
  int k_max = 16;
};

struct OutputConfig {
  std::string directory = ".";
  std::string format = "both";
  bool plot = false;
};

/// A validated experiment description. `manifold_json` and friends keep the
/// original records so that reports can echo the configuration verbatim.
struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  Experiment experiment = Experiment::spectrum;
  nlohmann::json raw;
  nlohmann::json manifold_json;
  std::optional<ConnectionConfig> connection;
  BackendConfig backend;
  SolverConfig solver;
  BoundsConfig bounds;
  FlowConfig flow;
  ProductConfig product;
  OutputConfig output;

  ModelManifold manifold() const;
  /// Connection over `base`; the trivial rank-1 frame when none was given.
  ConnectionSpec connection_on(const ModelManifold& base) const;
};

/// Parses and validates a configuration document. Throws ConfigError on
/// unknown keys, wrong types, out-of-range values or an unknown schema
/// version.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

ModelManifold manifold_from_json(const nlohmann::json& j);
HalfInt half_integer_from_json(const nlohmann::json& j, const std::string& where);

}  // namespace diraclab::cli
