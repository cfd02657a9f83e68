#include "diraclab/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "diraclab/errors.hpp"

namespace diraclab::cli {

using nlohmann::json;

namespace {

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
}

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  require_object(j, where);
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) throw ConfigError(where + ": unknown field \"" + key + "\"");
  }
}

const json& need(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing field \"" + key + "\"");
  return j.at(key);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  return j.get<double>();
}

double positive(const json& j, const std::string& where) {
  const double v = number(j, where);
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(where + ": must be positive and finite");
  return v;
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return j.get<int>();
}

int integer_in(const json& j, const std::string& where, int lo, int hi) {
  const int v = integer(j, where);
  if (v < lo || v > hi) {
    throw ConfigError(where + ": " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  }
  return v;
}

std::string text(const json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError(where + ": expected a string");
  return j.get<std::string>();
}

bool boolean(const json& j, const std::string& where) {
  if (!j.is_boolean()) throw ConfigError(where + ": expected true or false");
  return j.get<bool>();
}

CircleSpin circle_spin(const json& j, const std::string& where) {
  const auto s = text(j, where);
  if (s == "bounding") return CircleSpin::bounding;
  if (s == "non_bounding") return CircleSpin::non_bounding;
  throw ConfigError(where + ": spin must be \"bounding\" or \"non_bounding\"");
}

CycleSpin cycle_spin(const json& j, const std::string& where) {
  const auto s = text(j, where);
  if (s == "periodic") return CycleSpin::periodic;
  if (s == "antiperiodic") return CycleSpin::antiperiodic;
  throw ConfigError(where + ": spin must be \"periodic\" or \"antiperiodic\"");
}

Circle circle_record(const json& j, const std::string& where) {
  only_keys(j, where, {"type", "length", "spin"});
  if (j.contains("type") && text(j["type"], where + ".type") != "circle") {
    throw ConfigError(where + ": expected a circle");
  }
  Circle c;
  c.length = positive(need(j, "length", where), where + ".length");
  if (j.contains("spin")) c.spin = circle_spin(j["spin"], where + ".spin");
  return c;
}

ConnectionConfig parse_connection(const json& j) {
  const std::string where = "connection";
  require_object(j, where);
  ConnectionConfig c;
  c.type = text(need(j, "type", where), where + ".type");
  if (c.type == "constant_curvature") {
    only_keys(j, where, {"type", "degrees"});
    const auto& d = need(j, "degrees", where);
    if (!d.is_array() || d.empty()) throw ConfigError(where + ".degrees: expected a nonempty array");
    for (const auto& x : d) c.degrees.push_back(integer_in(x, where + ".degrees", -64, 64));
  } else if (c.type == "trivial_frame") {
    only_keys(j, where, {"type", "rank"});
    c.rank = integer_in(need(j, "rank", where), where + ".rank", 1, 64);
  } else if (c.type == "interpolated") {
    only_keys(j, where, {"type", "t"});
    c.t = number(need(j, "t", where), where + ".t");
    if (!(c.t >= 0.0 && c.t <= 1.0)) throw ConfigError(where + ".t: must lie in [0, 1]");
  } else {
    throw ConfigError(where + ".type: unknown connection \"" + c.type + "\"");
  }
  return c;
}

BackendConfig parse_backend(const json& j) {
  const std::string where = "backend";
  require_object(j, where);
  BackendConfig b;
  const auto type = text(need(j, "type", where), where + ".type");
  if (type == "sphere_spectral") {
    only_keys(j, where, {"type", "l_max"});
    b.type = Backend::sphere_spectral;
    if (j.contains("l_max")) b.l_max = half_integer_from_json(j["l_max"], where + ".l_max");
    if (b.l_max.twice < 2 || b.l_max.twice > 80) throw ConfigError(where + ".l_max: must lie in [1, 40]");
  } else if (type == "torus_lattice") {
    only_keys(j, where, {"type", "n1", "n2", "wilson"});
    b.type = Backend::torus_lattice;
    if (j.contains("n1")) b.n1 = integer_in(j["n1"], where + ".n1", 8, 1024);
    if (j.contains("n2")) b.n2 = integer_in(j["n2"], where + ".n2", 8, 1024);
    if (j.contains("wilson")) {
      b.wilson = number(j["wilson"], where + ".wilson");
      if (!(b.wilson > 0.0 && b.wilson <= 1.0)) throw ConfigError(where + ".wilson: must lie in (0, 1]");
    }
  } else if (type == "circle_fourier") {
    only_keys(j, where, {"type", "k_max"});
    b.type = Backend::circle_fourier;
    if (j.contains("k_max")) b.k_max = integer_in(j["k_max"], where + ".k_max", 1, 100000);
  } else {
    throw ConfigError(where + ".type: unknown backend \"" + type + "\"");
  }
  return b;
}

SolverConfig parse_solver(const json& j) {
  const std::string where = "solver";
  only_keys(j, where, {"count", "zero_threshold", "cluster_tolerance", "residual_tolerance", "method"});
  SolverConfig s;
  if (j.contains("count")) s.count = integer_in(j["count"], where + ".count", 1, 100000);
  if (j.contains("zero_threshold")) s.zero_threshold = positive(j["zero_threshold"], where + ".zero_threshold");
  if (j.contains("cluster_tolerance")) {
    s.cluster_tolerance = positive(j["cluster_tolerance"], where + ".cluster_tolerance");
  }
  if (j.contains("residual_tolerance")) {
    s.residual_tolerance = positive(j["residual_tolerance"], where + ".residual_tolerance");
  }
  if (j.contains("method")) {
    const auto m = text(j["method"], where + ".method");
    if (m == "automatic") {
      s.method = SolverMethod::automatic;
    } else if (m == "dense") {
      s.method = SolverMethod::dense;
    } else if (m == "iterative") {
      s.method = SolverMethod::iterative;
    } else {
      throw ConfigError(where + ".method: expected automatic, dense or iterative");
    }
  }
  return s;
}

}  // namespace

const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::spectrum:
      return "spectrum";
    case Experiment::bounds:
      return "bounds";
    case Experiment::index:
      return "index";
    case Experiment::flow:
      return "flow";
    case Experiment::product:
      return "product";
  }
  return "unknown";
}

Experiment experiment_from_string(const std::string& s) {
  for (auto e : {Experiment::spectrum, Experiment::bounds, Experiment::index, Experiment::flow,
                 Experiment::product}) {
    if (s == to_string(e)) return e;
  }
  throw ConfigError("experiment: unknown kind \"" + s + "\"");
}

HalfInt half_integer_from_json(const json& j, const std::string& where) {
  if (j.is_number_integer()) return HalfInt::integer(j.get<int>());
  if (j.is_number()) {
    const double twice = 2.0 * j.get<double>();
    if (std::abs(twice - std::round(twice)) > 1e-12) throw ConfigError(where + ": not a half-integer");
    return HalfInt::from_twice(static_cast<int>(std::lround(twice)));
  }
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    const auto slash = s.find('/');
    try {
      std::size_t used = 0;
      if (slash == std::string::npos) {
        const int v = std::stoi(s, &used);
        if (used != s.size()) throw ConfigError(where + ": malformed \"" + s + "\"");
        return HalfInt::integer(v);
      }
      if (s.substr(slash + 1) != "2") throw ConfigError(where + ": denominator must be 2");
      const auto num = s.substr(0, slash);
      const int v = std::stoi(num, &used);
      if (used != num.size()) throw ConfigError(where + ": malformed \"" + s + "\"");
      return HalfInt::from_twice(v);
    } catch (const std::logic_error&) {
      throw ConfigError(where + ": malformed \"" + s + "\"");
    }
  }
  throw ConfigError(where + ": expected a half-integer such as 21/2 or 10.5");
}

ModelManifold manifold_from_json(const json& j) {
  const std::string where = "manifold";
  require_object(j, where);
  const auto type = text(need(j, "type", where), where + ".type");
  try {
    if (type == "sphere") {
      only_keys(j, where, {"type", "radius"});
      return ModelManifold::sphere(positive(need(j, "radius", where), where + ".radius"));
    }
    if (type == "circle") {
      const Circle c = circle_record(j, where);
      return ModelManifold::circle(c.length, c.spin);
    }
    if (type == "flat_torus") {
      only_keys(j, where, {"type", "lengths", "spin"});
      const auto& l = need(j, "lengths", where);
      if (!l.is_array() || l.size() != 2) throw ConfigError(where + ".lengths: expected two lengths");
      std::array<CycleSpin, 2> spin{CycleSpin::antiperiodic, CycleSpin::antiperiodic};
      if (j.contains("spin")) {
        const auto& s = j["spin"];
        if (!s.is_array() || s.size() != 2) throw ConfigError(where + ".spin: expected two entries");
        spin = {cycle_spin(s[0], where + ".spin[0]"), cycle_spin(s[1], where + ".spin[1]")};
      }
      return ModelManifold::flat_torus(positive(l[0], where + ".lengths[0]"), positive(l[1], where + ".lengths[1]"),
                                       spin);
    }
    if (type == "product") {
      only_keys(j, where, {"type", "base", "circle"});
      const auto base = manifold_from_json(need(j, "base", where));
      return ModelManifold::product(base, circle_record(need(j, "circle", where), where + ".circle"));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(where + ": " + e.what());
  }
  throw ConfigError(where + ".type: unknown manifold \"" + type + "\"");
}

ModelManifold ExperimentConfig::manifold() const { return manifold_from_json(manifold_json); }

ConnectionSpec ExperimentConfig::connection_on(const ModelManifold& base) const {
  try {
    if (!connection || connection->type == "trivial_frame") {
      return ConnectionSpec::trivial_frame(base, connection ? connection->rank : 1);
    }
    if (connection->type == "constant_curvature") return ConnectionSpec::constant_curvature(base, connection->degrees);
    return stabilized_family(connection->t, base);
  } catch (const Error& e) {
    throw ConfigError(std::string("connection: ") + e.what());
  }
}

ExperimentConfig parse_config(const json& doc) {
  only_keys(doc, "config", {"schema_version", "experiment", "manifold", "connection", "backend", "solver", "bounds",
                            "flow", "product", "output"});
  ExperimentConfig c;
  c.raw = doc;
  c.schema_version = integer(need(doc, "schema_version", "config"), "schema_version");
  if (c.schema_version != kSchemaVersion) {
    throw ConfigError("schema_version " + std::to_string(c.schema_version) + " is not supported (expected " +
                      std::to_string(kSchemaVersion) + ")");
  }
  c.experiment = experiment_from_string(text(need(doc, "experiment", "config"), "experiment"));
  c.manifold_json = need(doc, "manifold", "config");
  const auto m = manifold_from_json(c.manifold_json);

  if (doc.contains("connection")) c.connection = parse_connection(doc["connection"]);
  if (doc.contains("backend")) {
    c.backend = parse_backend(doc["backend"]);
  } else if (m.is<FlatTorus>()) {
    c.backend.type = Backend::torus_lattice;
  } else if (m.is<Circle>()) {
    c.backend.type = Backend::circle_fourier;
  } else if (m.is<ProductWithCircle>()) {
    const auto& base = m.as<ProductWithCircle>().base;
    if (std::holds_alternative<FlatTorus>(base)) c.backend.type = Backend::torus_lattice;
    if (std::holds_alternative<Circle>(base)) c.backend.type = Backend::circle_fourier;
  }
  if (doc.contains("solver")) c.solver = parse_solver(doc["solver"]);
  if (doc.contains("bounds")) {
    const auto& b = doc["bounds"];
    only_keys(b, "bounds", {"atol", "relative"});
    if (b.contains("atol")) c.bounds.atol = positive(b["atol"], "bounds.atol");
    if (b.contains("relative")) c.bounds.relative = boolean(b["relative"], "bounds.relative");
  }
  if (doc.contains("flow")) {
    const auto& f = doc["flow"];
    only_keys(f, "flow", {"grid", "levels", "k", "eps", "atol"});
    if (f.contains("grid")) {
      if (!f["grid"].is_array()) throw ConfigError("flow.grid: expected an array");
      for (const auto& t : f["grid"]) c.flow.grid.push_back(number(t, "flow.grid"));
    }
    if (f.contains("levels")) c.flow.levels = integer_in(f["levels"], "flow.levels", 1, 40);
    if (f.contains("k")) c.flow.k = integer_in(f["k"], "flow.k", 4, 10000);
    if (f.contains("eps")) c.flow.eps = positive(f["eps"], "flow.eps");
    if (f.contains("atol")) c.flow.atol = positive(f["atol"], "flow.atol");
  }
  if (doc.contains("product")) {
    const auto& p = doc["product"];
    only_keys(p, "product", {"k_max"});
    if (p.contains("k_max")) c.product.k_max = integer_in(p["k_max"], "product.k_max", 1, 100000);
  }
  if (doc.contains("output")) {
    const auto& o = doc["output"];
    only_keys(o, "output", {"directory", "format", "plot"});
    if (o.contains("directory")) c.output.directory = text(o["directory"], "output.directory");
    if (o.contains("format")) c.output.format = text(o["format"], "output.format");
    if (o.contains("plot")) c.output.plot = boolean(o["plot"], "output.plot");
    if (c.output.format != "json" && c.output.format != "csv" && c.output.format != "both") {
      throw ConfigError("output.format: expected json, csv or both");
    }
  }

  // Cross-field checks that need the manifold.
  if (c.experiment == Experiment::flow && !m.is<Sphere>()) {
    throw ConfigError("flow experiments run on a sphere manifold");
  }
  if (c.experiment == Experiment::product && !m.is<ProductWithCircle>()) {
    throw ConfigError("product experiments need a product manifold");
  }
  if (c.experiment != Experiment::product && c.experiment != Experiment::flow) {
    (void)c.connection_on(m);
    const bool sphere = m.is<Sphere>(), torus = m.is<FlatTorus>(), circle = m.is<Circle>();
    if ((c.backend.type == Backend::sphere_spectral && !sphere) ||
        (c.backend.type == Backend::torus_lattice && !torus) ||
        (c.backend.type == Backend::circle_fourier && !circle) || c.backend.type == Backend::sphere_complex) {
      throw ConfigError("backend does not match the manifold");
    }
  }
  if ((c.experiment == Experiment::bounds || c.experiment == Experiment::index) && dimension(m) != 2) {
    throw ConfigError(std::string(to_string(c.experiment)) + " experiments need a surface");
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(doc);
}

}  // namespace diraclab::cli
