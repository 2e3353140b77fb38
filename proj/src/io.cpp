#include "lhs/io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "lhs/error.hpp"

namespace lhs {

namespace {

std::pair<std::string, std::map<std::string, std::string>> split_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  std::map<std::string, std::string> kv;
  const std::string name = spec.substr(0, colon);
  if (colon == std::string::npos) return {name, kv};
  std::stringstream ss(spec.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("expected key=value in '" + spec + "', got '" + item + "'");
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return {name, kv};
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw UsageError("parameter '" + key + "' is not a number: '" + v + "'");
  }
}

bool looks_like_file(const std::string& spec, const char* ext) {
  return spec.size() > std::string(ext).size() &&
         spec.compare(spec.size() - std::string(ext).size(), std::string::npos, ext) == 0;
}

template <class T>
T field(const Json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigurationError(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigurationError(where + "." + key + ": wrong type");
  }
}

}  // namespace

Instance parse_space_json(const Json& j, const std::string& name) {
  if (!j.is_object()) throw ConfigurationError("space definition must be a JSON object");
  const auto points = field<std::vector<std::vector<double>>>(j, "points", "space");
  if (points.empty()) throw ConfigurationError("space.points: empty");
  const auto dim = points[0].size();
  if (dim == 0) throw ConfigurationError("space.points[0]: empty coordinates");
  std::vector<double> coords;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != dim) {
      throw ConfigurationError("space.points[" + std::to_string(i) + "]: dimension mismatch");
    }
    coords.insert(coords.end(), points[i].begin(), points[i].end());
  }
  std::vector<double> weights = j.contains("weights")
                                    ? field<std::vector<double>>(j, "weights", "space")
                                    : std::vector<double>(points.size(), 1.0 / points.size());
  if (weights.size() != points.size()) throw ConfigurationError("space.weights: length mismatch");
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0)) throw ConfigurationError("space.weights[" + std::to_string(i) + "]: must be positive");
  }
  Quasidistance rho;
  if (j.contains("rho")) {
    const Json& r = j.at("rho");
    const auto kind = field<std::string>(r, "kind", "space.rho");
    if (kind == "euclidean") {
      rho.exponent = 1.0;
    } else if (kind == "power") {
      if (!r.contains("params")) throw ConfigurationError("space.rho: missing field 'params'");
      rho.exponent = field<double>(r.at("params"), "exponent", "space.rho.params");
      if (!(rho.exponent >= 1.0)) throw ConfigurationError("space.rho.params.exponent: must be >= 1");
    } else {
      throw ConfigurationError("space.rho.kind: unknown kind '" + kind + "'");
    }
  }
  Instance inst;
  inst.name = name;
  inst.space = Space(PointCloud(static_cast<int>(dim), std::move(coords), std::move(weights)), rho);
  if (!j.contains("levels") || !j.at("levels").is_array()) {
    throw ConfigurationError("space: missing array 'levels'");
  }
  std::vector<Level> levels;
  const auto N = points.size();
  for (std::size_t li = 0; li < j.at("levels").size(); ++li) {
    const Json& L = j.at("levels")[li];
    const std::string where = "space.levels[" + std::to_string(li) + "]";
    IdSet ids;
    if (L.contains("ids")) {
      ids = field<IdSet>(L, "ids", where);
      std::sort(ids.begin(), ids.end());
      ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
      for (Id x : ids) {
        if (x < 0 || static_cast<std::size_t>(x) >= N) throw ConfigurationError(where + ".ids: id out of range");
      }
    } else if (L.contains("box")) {
      const auto box = field<std::vector<std::vector<double>>>(L, "box", where);
      if (box.size() != dim) throw ConfigurationError(where + ".box: dimension mismatch");
      for (std::size_t i = 0; i < N; ++i) {
        bool in = true;
        for (std::size_t k = 0; k < dim; ++k) {
          if (box[k].size() != 2) throw ConfigurationError(where + ".box: expected [lo, hi] pairs");
          const double x = points[i][k];
          in = in && x > box[k][0] && x < box[k][1];
        }
        if (in) ids.push_back(static_cast<Id>(i));
      }
    } else {
      throw ConfigurationError(where + ": needs 'ids' or 'box'");
    }
    levels.push_back(make_level(N, std::move(ids), field<double>(L, "eps", where),
                                L.contains("B") ? field<double>(L, "B", where) : rho.triangle_constant(),
                                field<double>(L, "C", where)));
  }
  inst.structure = LocalStructure(std::move(levels));
  validate_structure(inst.space, inst.structure);
  return inst;
}

Instance load_space_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open space file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw UsageError(path + ": " + e.what());
  }
  return parse_space_json(j, std::filesystem::path(path).stem().string());
}

Instance resolve_space(const std::string& spec) {
  if (looks_like_file(spec, ".json") || std::filesystem::is_regular_file(spec)) return load_space_file(spec);
  auto [name, kv] = split_spec(spec);
  BuiltinParams p;
  for (const auto& [k, v] : kv) {
    if (k == "N") {
      p.N = static_cast<std::size_t>(to_double(k, v));
    } else if (k == "exponent" || k == "s") {
      p.exponent = to_double(k, v);
    } else if (k == "levels") {
      p.levels = static_cast<int>(to_double(k, v));
    } else if (k == "weights") {
      p.weight_profile = v;
    } else {
      throw UsageError("unknown space parameter '" + k + "'");
    }
  }
  return instantiate_builtin(name, p);
}

SampledFunction load_function_csv(const std::string& path, std::size_t n_points) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open function file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw UsageError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "point_id,value") throw UsageError(path + ":1: expected header 'point_id,value'");
  SampledFunction f;
  f.values.assign(n_points, 0.0);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    const std::string where = path + ":" + std::to_string(lineno);
    if (comma == std::string::npos) throw UsageError(where + ": expected 'point_id,value'");
    double id = 0.0, v = 0.0;
    try {
      id = to_double("point_id", line.substr(0, comma));
      v = to_double("value", line.substr(comma + 1));
    } catch (const UsageError& e) {
      throw UsageError(where + ": " + e.what());
    }
    if (id < 0 || id >= static_cast<double>(n_points) || id != std::floor(id)) {
      throw UsageError(where + ": point_id out of range");
    }
    f.values[static_cast<std::size_t>(id)] = v;
  }
  return f;
}

SampledFunction resolve_function(const std::string& spec, const Space& space) {
  if (looks_like_file(spec, ".csv") || std::filesystem::is_regular_file(spec)) {
    return load_function_csv(spec, space.size());
  }
  auto [name, kv] = split_spec(spec);
  FunctionParams p;
  for (const auto& [k, v] : kv) {
    if (k == "c") {
      p.c = to_double(k, v);
    } else if (k == "seed") {
      p.seed = static_cast<std::uint64_t>(to_double(k, v));
    } else if (k == "axis") {
      p.axis = static_cast<int>(to_double(k, v));
    } else if (k == "threshold") {
      p.threshold = to_double(k, v);
    } else if (k == "pieces") {
      p.pieces = static_cast<int>(to_double(k, v));
    } else if (k == "anchor") {
      std::vector<double> a;
      std::stringstream ss(v);
      std::string part;
      while (std::getline(ss, part, ';')) a.push_back(to_double(k, part));
      p.anchor = a;
    } else {
      throw UsageError("unknown function parameter '" + k + "'");
    }
  }
  return function_library(name, p, space);
}

}  // namespace lhs
