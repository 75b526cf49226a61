#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "partime/harness.hpp"

namespace partime {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <typename T>
T get(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
  return obj.contains(key) ? get<T>(obj, key, where) : fallback;
}

cplx parse_coefficient(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  if (v.is_string()) return parse_complex(v.get<std::string>());
  throw ConfigError("coefficient must be a number, [re, im] or a string");
}

Scheme parse_scheme_name(const std::string& s) {
  if (s == "forward-euler") return Scheme::ForwardEuler;
  if (s == "backward-euler") return Scheme::BackwardEuler;
  if (s == "theta") return Scheme::Theta;
  if (s == "rk4") return Scheme::RK4;
  if (s == "sdirk2") return Scheme::SDIRK2;
  if (s == "rational") return Scheme::Rational;
  throw ConfigError("unknown scheme '" + s + "'");
}

SchemeSpec parse_scheme(const json& j, const std::string& where, bool dt_required) {
  reject_unknown(j, {"scheme", "dt", "theta", "num", "den"}, where);
  SchemeSpec s;
  s.kind = parse_scheme_name(get<std::string>(j, "scheme", where));
  s.dt = dt_required ? get<double>(j, "dt", where) : get_or<double>(j, "dt", 0.0, where);
  s.theta = get_or<double>(j, "theta", 0.5, where);
  if (s.theta < 0.0 || s.theta > 1.0) throw ConfigError(where + ".theta must lie in [0, 1]");
  if (j.contains("num"))
    for (const auto& c : j.at("num")) s.num.push_back(parse_coefficient(c));
  if (j.contains("den"))
    for (const auto& c : j.at("den")) s.den.push_back(parse_coefficient(c));
  if (s.kind == Scheme::Rational && (s.num.empty() || s.den.empty()))
    throw ConfigError(where + ": rational scheme needs num and den");
  if (dt_required && !(s.dt > 0.0)) throw ConfigError(where + ".dt must be positive");
  if (s.dt < 0.0) throw ConfigError(where + ".dt must be positive");
  return s;
}

SpatialParams parse_spatial(const json& j) {
  reject_unknown(j, {"kind", "n", "h", "velocity", "path"}, "spatial");
  SpatialParams p;
  const auto kind = get<std::string>(j, "kind", "spatial");
  if (kind == "laplacian-1d-dirichlet") p.kind = SpatialKind::Laplacian1D;
  else if (kind == "advection-1d-upwind") p.kind = SpatialKind::Advection1DUpwind;
  else if (kind == "from-file") p.kind = SpatialKind::FromFile;
  else throw ConfigError("unknown spatial kind '" + kind + "'");
  if (p.kind == SpatialKind::FromFile) {
    p.path = get<std::string>(j, "path", "spatial");
  } else {
    p.n = get<int>(j, "n", "spatial");
    if (p.n < 1) throw ConfigError("spatial.n must be >= 1");
  }
  p.h = get_or<double>(j, "h", 0.0, "spatial");
  p.velocity = get_or<double>(j, "velocity", 1.0, "spatial");
  return p;
}

}  // namespace

const char* to_string(NormKind n) {
  switch (n) {
    case NormKind::L2: return "l2";
    case NormKind::AstarA: return "astar_a";
    case NormKind::Modified: return "modified";
  }
  return "?";
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
  reject_unknown(j, {"name", "spatial", "fine", "coarse", "grid", "relaxations", "norms", "iterations", "mode",
                     "rhs", "seed", "cap"},
                 "configuration");
  ExperimentConfig c;
  c.name = get_or<std::string>(j, "name", c.name, "configuration");
  if (!j.contains("spatial") || !j.contains("fine") || !j.contains("grid"))
    throw ConfigError("configuration needs spatial, fine and grid sections");
  c.spatial = parse_spatial(j.at("spatial"));
  c.fine = parse_scheme(j.at("fine"), "fine", true);
  c.coarse = j.contains("coarse") ? parse_scheme(j.at("coarse"), "coarse", false) : c.fine;
  if (!j.contains("coarse")) c.coarse.dt = 0.0;

  const json& g = j.at("grid");
  reject_unknown(g, {"N", "k", "Nc"}, "grid");
  c.grid.k = get<int>(g, "k", "grid");
  if (g.contains("N") == g.contains("Nc")) throw ConfigError("grid needs exactly one of N and Nc");
  c.grid.N = g.contains("N") ? get<int>(g, "N", "grid") : (get<int>(g, "Nc", "grid") - 1) * c.grid.k + 1;
  c.grid.validate();

  if (j.contains("relaxations")) {
    c.relaxations.clear();
    for (const auto& r : j.at("relaxations")) {
      const auto s = r.get<std::string>();
      if (s == "F") c.relaxations.push_back(Relaxation::F);
      else if (s == "FCF") c.relaxations.push_back(Relaxation::FCF);
      else throw ConfigError("unknown relaxation '" + s + "'");
    }
  }
  if (j.contains("norms")) {
    c.norms.clear();
    for (const auto& r : j.at("norms")) {
      const auto s = r.get<std::string>();
      if (s == "l2") c.norms.push_back(NormKind::L2);
      else if (s == "astar_a") c.norms.push_back(NormKind::AstarA);
      else if (s == "modified") c.norms.push_back(NormKind::Modified);
      else throw ConfigError("unknown norm '" + s + "'");
    }
  }
  c.iterations = get_or<int>(j, "iterations", c.iterations, "configuration");
  if (c.iterations < 1) throw ConfigError("iterations must be >= 1");
  const auto mode = get_or<std::string>(j, "mode", "worst-case", "configuration");
  if (mode == "worst-case") c.worst_case = true;
  else if (mode == "random") c.worst_case = false;
  else throw ConfigError("unknown mode '" + mode + "'");
  const auto rhs = get_or<std::string>(j, "rhs", "zero", "configuration");
  if (rhs == "zero") c.random_rhs = false;
  else if (rhs == "random") c.random_rhs = true;
  else throw ConfigError("unknown rhs '" + rhs + "'");
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed, "configuration");
  c.cap = get_or<std::size_t>(j, "cap", c.cap, "configuration");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace partime
