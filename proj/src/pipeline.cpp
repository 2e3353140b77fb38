#include "lhs/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "lhs/bmo_jn.hpp"
#include "lhs/covering.hpp"
#include "lhs/dyadic.hpp"
#include "lhs/error.hpp"
#include "lhs/maximal.hpp"
#include "lhs/sharp_cz.hpp"

namespace lhs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class T>
T param(const Json& p, const char* key, T fallback) {
  if (!p.contains(key)) return fallback;
  try {
    return p.at(key).get<T>();
  } catch (const Json::exception&) {
    throw UsageError(std::string("parameter '") + key + "' has the wrong type");
  }
}

std::vector<double> param_list(const Json& p, const char* key, std::vector<double> fallback) {
  if (!p.contains(key)) return fallback;
  const Json& v = p.at(key);
  if (v.is_number()) return {v.get<double>()};
  return param<std::vector<double>>(p, key, fallback);
}

std::vector<std::string> param_strings(const Json& p, const char* key,
                                       std::vector<std::string> fallback) {
  if (!p.contains(key)) return fallback;
  const Json& v = p.at(key);
  if (v.is_string()) return {v.get<std::string>()};
  return param<std::vector<std::string>>(p, key, fallback);
}

// Platform-stable draws from a 64-bit engine.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
std::size_t index(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

struct ForestArgs {
  int n;
  double delta;
  int depth;
  int k0;
};

ForestArgs forest_args(const Instance& inst, const Json& p) {
  ForestArgs a;
  a.n = param(p, "n", 1);
  a.delta = param(p, "delta", 0.25);
  if (!p.contains("depth") || (p.at("depth").is_string() && p.at("depth") == "atomic")) {
    a.depth = atomic_depth(inst.space, inst.structure, a.n, a.delta);
  } else {
    a.depth = param(p, "depth", 4);
  }
  a.k0 = p.contains("k0") && p.at("k0").is_number() ? p.at("k0").get<int>() : 0;
  return a;
}

DyadicForest forest_for(const Instance& inst, ForestArgs& a) {
  auto F = build_forest(inst.space, inst.structure, a.n, a.delta, a.depth);
  if (a.k0 <= 0) a.k0 = small_root_generation(inst.space, inst.structure, F);
  return F;
}

VerificationReport error_report(const std::string& check, const std::exception& e) {
  VerificationReport r;
  r.check = check;
  r.pass = false;
  r.data["error"] = e.what();
  return r;
}

void op_axioms(const Instance& I, const Json& p, std::uint64_t seed, StepResult& out) {
  out.reports.push_back(verify_axioms(I.space, I.structure, param<std::int64_t>(p, "budget", 200000), seed));
}

void op_cubes(const Instance& I, const Json& p, std::uint64_t seed, StepResult& out) {
  auto a = forest_args(I, p);
  if (!p.contains("depth")) a.depth = 4;
  const auto F = build_forest(I.space, I.structure, a.n, a.delta, a.depth);
  auto rep = verify_forest(I.space, I.structure, F, param<std::int64_t>(p, "budget", 200000), seed);
  rep.data["delta"] = a.delta;
  rep.data["depth"] = a.depth;
  out.reports.push_back(std::move(rep));
}

void op_vitali(const Instance& I, const Json& p, std::uint64_t seed, StepResult& out) {
  const int n = param(p, "n", 1);
  const int families = param(p, "families", 20);
  const int balls = param(p, "balls", 8);
  const auto cap = vitali_radius_cap(I.structure, n);
  const auto& ids = I.structure.level(n).ids;
  std::mt19937_64 rng(seed);
  VerificationReport rep;
  rep.check = "vitali_suite";
  rep.anchor = "Vitali covering lemma";
  Table t{"families", {"family", "size", "selected", "disjoint", "uncovered", "c_hat"}, {}};
  double c_min = kInf;
  for (int fi = 0; fi < families; ++fi) {
    BallFamily fam;
    fam.level = n;
    Mask in(I.space.size(), 0);
    for (int b = 0; b < balls; ++b) {
      const Id c = ids[index(rng, ids.size())];
      const double r = cap.r * (1.0 - unit(rng));
      fam.balls.push_back({c, r});
      for (Id y : ball(I.space, c, r)) in[static_cast<std::size_t>(y)] = 1;
    }
    const auto res = vitali_select(I.space, I.structure, fam, mask_to_ids(in));
    const auto& d = res.report.data;
    const double c_hat = d.at("c_hat").get<double>();
    c_min = std::min(c_min, c_hat);
    rep.pass = rep.pass && res.report.pass;
    t.rows.push_back({static_cast<double>(fi), static_cast<double>(balls),
                      static_cast<double>(res.selected.balls.size()), d.at("disjoint").get<bool>() ? 1.0 : 0.0,
                      static_cast<double>(d.at("uncovered").get<std::size_t>()), c_hat});
  }
  rep.data["n"] = n;
  rep.data["families"] = families;
  rep.data["K_n"] = cap.K;
  rep.data["r_n"] = cap.r;
  rep.data["c_hat_min"] = jnum(c_min);
  rep.tables.push_back(std::move(t));
  out.reports.push_back(std::move(rep));
}

void op_cover(const Instance& I, const Json& p, std::uint64_t, StepResult& out) {
  const int n = param(p, "n", 1);
  const double delta = param(p, "delta", 0.25);
  const int depth = param(p, "depth", 6);
  const auto F = build_forest(I.space, I.structure, n + 1, delta, depth);
  int k = param(p, "k", 0);
  if (k <= 0) {
    for (k = 1; k <= depth; ++k) {
      try {
        finite_ball_cover(I.space, I.structure, F, n, k);
        break;
      } catch (const ScaleError&) {
      }
    }
    if (k > depth) throw ScaleError("no generation up to the forest depth admits a cover");
  }
  auto cover = finite_ball_cover(I.space, I.structure, F, n, k);
  out.reports.push_back(std::move(cover.report));
  if (I.structure.has(n + 2)) {
    out.reports.push_back(cover_lp_check(I.space, I.structure, F,
                                         param_strings(p, "family", {"zero", "left_half", "centered_linear"}),
                                         n, k, param(p, "p", 2.0)));
  }
}

void op_maximal(const Instance& I, const SampledFunction& f, const Json& p, StepResult& out) {
  const int n = param(p, "n", 1);
  const double pp = param(p, "p", 2.0);
  const auto M = local_maximal(I.space, I.structure, f, n);
  double mx = 0.0;
  for (Id x : I.structure.level(n + 1).ids) mx = std::max(mx, std::fabs(f(x)));
  std::vector<double> ts = param_list(p, "t_grid", {});
  if (ts.empty() && mx > 0.0) {
    for (int j = 0; j <= 16; ++j) ts.push_back(mx * std::pow(10.0, -4.0 + j / 4.0));
  }
  auto weak = weak_type_check(I.space, I.structure, f, n, ts);
  Table vals{"values", {"point_id", "f", "Mf"}, {}};
  for (Id x : I.structure.level(n).ids) vals.rows.push_back({static_cast<double>(x), f(x), M.values(x)});
  weak.tables.push_back(std::move(vals));
  out.reports.push_back(std::move(weak));
  out.reports.push_back(strong_type_check(I.space, I.structure, f, n, pp));
  out.reports.push_back(differentiation_check(I.space, I.structure, f, n));
}

void op_sharp(const Instance& I, const SampledFunction& f, const Json& p, StepResult& out) {
  auto a = forest_args(I, p);
  const auto F = forest_for(I, a);
  const Id root = central_root(I.space, F, a.k0);
  auto rep = sharp_comparison_check(I.space, I.structure, F, f, root);
  const auto dy = dyadic_sharp(I.space, F, f.restricted_to(F.cube(root).members), root);
  const auto bs = ball_sharp(I.space, I.structure, f.restricted_to(F.cube(root).members), a.n + 1);
  Table t{"values", {"point_id", "f", "dyadic_sharp", "ball_sharp"}, {}};
  for (Id x : F.cube(root).members) t.rows.push_back({static_cast<double>(x), f(x), dy.values(x), bs(x)});
  rep.tables.push_back(std::move(t));
  out.reports.push_back(std::move(rep));
}

std::vector<double> default_lambdas(const Instance& I, const DyadicForest& F, const SampledFunction& f,
                                    Id root, int count) {
  auto v = f.effective();
  for (auto& x : v) x = std::fabs(x);
  double a = cube_average(I.space, F, root, v);
  if (!(a > 0.0)) a = 1.0;
  std::vector<double> ls;
  for (int j = 0; j < count; ++j) ls.push_back(a * std::pow(1.5, j));
  return ls;
}

void op_cz(const Instance& I, const SampledFunction& f, const Json& p, StepResult& out) {
  auto a = forest_args(I, p);
  const auto F = forest_for(I, a);
  const Id root = central_root(I.space, F, a.k0);
  auto ls = param_list(p, "lambdas", default_lambdas(I, F, f, root, param(p, "count", 16)));
  std::sort(ls.begin(), ls.end());
  out.reports.push_back(cz_family_properties(I.space, I.structure, F, f, root, ls));
}

void op_fs(const Instance& I, const SampledFunction& f, const Json& p, StepResult& out) {
  auto a = forest_args(I, p);
  const auto F = forest_for(I, a);
  const Id root = central_root(I.space, F, a.k0);
  const double bound = param(p, "ratio_bound", 50.0);
  out.summary = Table{"ratios", {"p", "sharp", "ratio"}, {}};
  for (double pp : param_list(p, "p", {1.0, 2.0, 4.0})) {
    for (const auto& kind : param_strings(p, "sharp", {"dyadic", "ball"})) {
      auto r = fs_verify(I.space, I.structure, F, f, root, pp, kind);
      r.report.data["ratio_bound"] = bound;
      r.report.pass = r.report.pass && r.ratio <= bound;
      out.summary.rows.push_back({pp, kind == "dyadic" ? 0.0 : 1.0, r.ratio});
      out.reports.push_back(std::move(r.report));
    }
  }
}

void op_corollary(const Instance& I, const SampledFunction& f, const Json& p, StepResult& out) {
  auto a = forest_args(I, p);
  const auto F = forest_for(I, a);
  out.reports.push_back(corollary_ball_check(I.space, I.structure, F, f, central_root(I.space, F, a.k0), param(p, "p", 2.0)));
}

void op_bmo(const Instance& I, const SampledFunction& f, const Json& p, StepResult& out) {
  const int n = param(p, "n", 1);
  for (double pp : param_list(p, "p", {2.0, 4.0})) {
    out.reports.push_back(bmo_equiv_check(I.space, I.structure, f, n, pp));
  }
}

void op_jn(const Instance& I, const SampledFunction& f, const Json& p, StepResult& out) {
  const int n = param(p, "n", 1);
  const auto near = param_list(p, "near", {});
  BallRef S = default_jn_ball(I.space, I.structure, n, near);
  if (p.contains("center")) S.center = param<Id>(p, "center", S.center);
  if (p.contains("radius")) S.radius = param(p, "radius", S.radius);
  auto T = jn_construct(I.space, I.structure, f, n, S, param(p, "steps", 3), param(p, "lambda0", 0.0));
  out.reports.push_back(std::move(T.report));
  const auto grid = param_list(p, "lambda_grid", {});
  auto D = jn_verify(I.space, I.structure, f, n, S, grid);
  out.reports.push_back(std::move(D.report));
}

std::string fmt(double x) {
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream o(path, std::ios::binary);
  if (!o) throw UsageError("cannot write '" + path.string() + "'");
  o << text;
}

}  // namespace

const std::vector<std::string>& operation_names() {
  static const std::vector<std::string> names{"axioms", "cubes", "vitali", "cover", "maximal", "sharp",
                                              "cz",     "fs",    "corollary", "bmo", "jn"};
  return names;
}

ExperimentConfig parse_config(const Json& j) {
  if (!j.is_object()) throw UsageError("config: expected a JSON object");
  ExperimentConfig c;
  auto str = [&](const char* key, std::string& dst) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_string()) throw UsageError(std::string("config.") + key + ": expected a string");
    dst = j.at(key).get<std::string>();
  };
  str("space", c.space);
  str("function", c.function);
  str("out", c.out);
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw UsageError("config.seed: expected a nonnegative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("formats")) {
    try {
      c.formats = j.at("formats").get<std::vector<std::string>>();
    } catch (const Json::exception&) {
      throw UsageError("config.formats: expected an array of strings");
    }
    for (const auto& f : c.formats) {
      if (f != "json" && f != "csv" && f != "svg") throw UsageError("config.formats: unsupported format '" + f + "'");
    }
  }
  if (!j.contains("pipeline") || !j.at("pipeline").is_array()) throw UsageError("config.pipeline: expected an array");
  const auto& ops = operation_names();
  for (std::size_t i = 0; i < j.at("pipeline").size(); ++i) {
    const Json& s = j.at("pipeline")[i];
    const std::string where = "config.pipeline[" + std::to_string(i) + "]";
    Step st;
    if (s.is_string()) {
      st.op = s.get<std::string>();
    } else if (s.is_object() && s.contains("op") && s.at("op").is_string()) {
      st.op = s.at("op").get<std::string>();
      if (s.contains("params")) {
        if (!s.at("params").is_object()) throw UsageError(where + ".params: expected an object");
        st.params = s.at("params");
      }
    } else {
      throw UsageError(where + ": expected an op name or {\"op\": ..., \"params\": {...}}");
    }
    if (std::find(ops.begin(), ops.end(), st.op) == ops.end()) {
      throw UsageError(where + ".op: unknown operation '" + st.op + "'");
    }
    c.pipeline.push_back(std::move(st));
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config '" + path + "'");
  try {
    return parse_config(Json::parse(in));
  } catch (const Json::parse_error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

Json config_to_json(const ExperimentConfig& c) {
  Json pipe = Json::array();
  for (const auto& s : c.pipeline) pipe.push_back({{"op", s.op}, {"params", s.params}});
  return {{"space", c.space}, {"function", c.function}, {"pipeline", pipe},
          {"seed", c.seed},   {"formats", c.formats}};
}

std::string config_hash(const ExperimentConfig& c) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << fnv1a(config_to_json(c).dump());
  return s.str();
}

ExperimentConfig suite_config(const std::string& space, const std::string& out, std::uint64_t seed) {
  ExperimentConfig c;
  c.space = space;
  c.out = out;
  c.seed = seed;
  c.function = "log_singularity";
  c.pipeline.push_back({"axioms", Json::object()});
  c.pipeline.push_back({"cubes", Json::object()});
  c.pipeline.push_back({"vitali", Json::object()});
  c.pipeline.push_back({"cover", {{"required", false}}});
  for (const auto& fn : function_names()) {
    c.pipeline.push_back({"maximal", {{"function", fn}}});
    c.pipeline.push_back({"sharp", {{"function", fn}, {"required", false}}});
    c.pipeline.push_back({"cz", {{"function", fn}}});
    c.pipeline.push_back({"fs", {{"function", fn}}});
    c.pipeline.push_back({"corollary", {{"function", fn}, {"required", false}}});
    c.pipeline.push_back({"bmo", {{"function", fn}}});
    c.pipeline.push_back({"jn", {{"function", fn}}});
  }
  return c;
}

Json StepResult::to_json() const {
  Json reps = Json::array();
  for (const auto& r : reports) reps.push_back(r.to_json());
  Json j{{"op", op}, {"function", function}, {"required", required}, {"pass", pass}, {"reports", reps}};
  if (!error.empty()) j["error"] = error;
  return j;
}

StepResult run_step(const Instance& I, const Step& step, const std::string& default_function,
                    std::uint64_t seed) {
  StepResult out;
  out.op = step.op;
  const Json& p = step.params;
  out.required = param(p, "required", true);
  out.function = param<std::string>(p, "function", default_function);
  try {
    const bool needs_f = step.op != "axioms" && step.op != "cubes" && step.op != "vitali" && step.op != "cover";
    SampledFunction f;
    if (needs_f) f = resolve_function(out.function, I.space);
    else out.function.clear();
    if (step.op == "axioms") op_axioms(I, p, seed, out);
    else if (step.op == "cubes") op_cubes(I, p, seed, out);
    else if (step.op == "vitali") op_vitali(I, p, seed, out);
    else if (step.op == "cover") op_cover(I, p, seed, out);
    else if (step.op == "maximal") op_maximal(I, f, p, out);
    else if (step.op == "sharp") op_sharp(I, f, p, out);
    else if (step.op == "cz") op_cz(I, f, p, out);
    else if (step.op == "fs") op_fs(I, f, p, out);
    else if (step.op == "corollary") op_corollary(I, f, p, out);
    else if (step.op == "bmo") op_bmo(I, f, p, out);
    else if (step.op == "jn") op_jn(I, f, p, out);
    else throw UsageError("unknown operation '" + step.op + "'");
  } catch (const UsageError&) {
    throw;
  } catch (const Error& e) {
    out.error = e.what();
    out.reports.push_back(error_report(step.op, e));
  }
  for (const auto& r : out.reports) out.pass = out.pass && r.pass;
  return out;
}

RunResult run_experiment(const ExperimentConfig& config) {
  const Instance inst = resolve_space(config.space);
  RunResult rr;
  rr.dir = std::filesystem::path(config.out) / config_hash(config);
  std::filesystem::create_directories(rr.dir);
  write_text(rr.dir / "config.json", config_to_json(config).dump(2) + "\n");
  Json steps = Json::array();
  bool all_required = true;
  for (std::size_t i = 0; i < config.pipeline.size(); ++i) {
    const auto res = run_step(inst, config.pipeline[i], config.function, config.seed);
    std::ostringstream stem;
    stem << std::setw(2) << std::setfill('0') << i << "_" << res.op;
    if (!res.function.empty()) stem << "_" << res.function.substr(0, res.function.find(':'));
    const auto base = rr.dir / stem.str();
    write_text(base.string() + ".json", res.to_json().dump(2) + "\n");
    for (const auto& fmt_name : config.formats) {
      if (fmt_name == "json") continue;
      for (std::size_t k = 0; k < res.reports.size(); ++k) {
        if (res.reports[k].tables.empty()) continue;
        emit_report(res.reports[k], fmt_name, base.string() + "_" + std::to_string(k));
      }
      if (fmt_name == "csv" && !res.summary.rows.empty()) {
        // One row per (function, p, sharp kind).
        std::ostringstream csv;
        csv << "function,p,sharp,ratio\n";
        for (const auto& row : res.summary.rows) {
          csv << res.function << "," << fmt(row[0]) << "," << (row[1] == 0.0 ? "dyadic" : "ball") << ","
              << fmt(row[2]) << "\n";
        }
        write_text(base.string() + "_ratios.csv", csv.str());
      }
    }
    if (res.required) all_required = all_required && res.pass;
    steps.push_back({{"index", i},
                     {"op", res.op},
                     {"function", res.function},
                     {"required", res.required},
                     {"pass", res.pass},
                     {"file", stem.str() + ".json"}});
  }
  rr.summary = {{"space", inst.name},  {"points", inst.space.size()}, {"seed", config.seed},
                {"steps", steps},      {"pass", all_required},        {"config_hash", config_hash(config)}};
  write_text(rr.dir / "summary.json", rr.summary.dump(2) + "\n");
  rr.exit_code = all_required ? 0 : 1;
  return rr;
}

void write_csv(const Table& table, const std::filesystem::path& path) {
  std::ostringstream s;
  for (std::size_t i = 0; i < table.columns.size(); ++i) s << (i ? "," : "") << table.columns[i];
  s << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) s << (i ? "," : "") << fmt(row[i]);
    s << "\n";
  }
  write_text(path, s.str());
}

void write_svg(const Table& table, const std::filesystem::path& path) {
  const double W = 640, H = 400, m = 48;
  double x0 = kInf, x1 = -kInf, y0 = kInf, y1 = -kInf;
  for (const auto& row : table.rows) {
    if (row.empty() || !std::isfinite(row[0])) continue;
    x0 = std::min(x0, row[0]);
    x1 = std::max(x1, row[0]);
    for (std::size_t c = 1; c < row.size(); ++c) {
      if (!std::isfinite(row[c])) continue;
      y0 = std::min(y0, row[c]);
      y1 = std::max(y1, row[c]);
    }
  }
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) y1 = y0 + 1.0;
  auto X = [&](double x) { return m + (x - x0) / (x1 - x0) * (W - 2 * m); };
  auto Y = [&](double y) { return H - m - (y - y0) / (y1 - y0) * (H - 2 * m); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << m << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" << table.name << "</text>\n";
  s << "<line x1=\"" << m << "\" y1=\"" << H - m << "\" x2=\"" << W - m << "\" y2=\"" << H - m << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << m << "\" y1=\"" << m << "\" x2=\"" << m << "\" y2=\"" << H - m << "\" stroke=\"black\"/>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" font-family=\"sans-serif\" font-size=\"12\">"
    << (table.columns.empty() ? "" : table.columns[0]) << "</text>\n";
  for (std::size_t c = 1; c < table.columns.size(); ++c) {
    // Step plot: the data are distribution-like functions.
    s << "<polyline fill=\"none\" stroke=\"" << colors[(c - 1) % 5] << "\" points=\"";
    bool first = true;
    double prev_y = 0.0;
    for (const auto& row : table.rows) {
      if (c >= row.size() || !std::isfinite(row[0]) || !std::isfinite(row[c])) continue;
      if (!first) s << fmt(X(row[0])) << "," << fmt(Y(prev_y)) << " ";
      s << fmt(X(row[0])) << "," << fmt(Y(row[c])) << " ";
      prev_y = row[c];
      first = false;
    }
    s << "\"/>\n";
    s << "<text x=\"" << W - m - 100 << "\" y=\"" << m + 16 * c << "\" fill=\"" << colors[(c - 1) % 5]
      << "\" font-family=\"sans-serif\" font-size=\"12\">" << table.columns[c] << "</text>\n";
  }
  s << "</svg>\n";
  write_text(path, s.str());
}

void emit_report(const VerificationReport& report, const std::string& format,
                 const std::filesystem::path& stem) {
  if (format == "json") {
    write_text(stem.string() + ".json", report.to_json().dump(2) + "\n");
    return;
  }
  if (format != "csv" && format != "svg") throw UsageError("unsupported format '" + format + "'");
  if (report.tables.empty()) {
    throw UsageError("report '" + report.check + "' has no tables to emit as " + format);
  }
  for (const auto& t : report.tables) {
    const std::string path = stem.string() + "_" + t.name + "." + format;
    if (format == "csv") write_csv(t, path);
    else write_svg(t, path);
  }
}

}  // namespace lhs
