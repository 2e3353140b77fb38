#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lhs/error.hpp"
#include "lhs/pipeline.hpp"

namespace {

struct Globals {
  std::string space = "grid1d";
  std::string function = "log_singularity";
  std::string out = "runs";
  std::uint64_t seed = 7;
  int threads = 0;
  std::vector<std::string> formats{"json", "csv"};
};

struct Options {
  int level = 1;
  double p = 2.0;
  std::vector<double> ps;
  double delta = 0.25;
  std::string depth;
  int k0 = 1;
  int k = 0;
  int steps = 3;
  double lambda0 = 0.0;
  std::vector<double> lambda_grid;
  std::vector<std::string> sharp;
  std::int64_t budget = 200000;
  int families = 20;
  int balls = 8;
};

lhs::Json forest_params(const Options& o) {
  lhs::Json p{{"n", o.level}, {"delta", o.delta}, {"k0", o.k0}};
  if (o.depth == "atomic") p["depth"] = "atomic";
  else if (!o.depth.empty()) p["depth"] = std::stoi(o.depth);
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification of harmonic analysis constructions on locally homogeneous point clouds"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--space", g.space, "builtin space (e.g. grid1d:N=1024) or JSON space file");
  app.add_option("--function", g.function, "builtin function (e.g. two_valued:threshold=0.3) or CSV file");
  app.add_option("--out", g.out, "output root; reports go to <out>/<config hash>/");
  app.add_option("--seed", g.seed, "seed for sampled checks");
  app.add_option("--threads", g.threads, "OpenMP threads (0 = runtime default)");
  app.add_option("--format", g.formats, "output formats: json csv svg")->delimiter(',');

  Options o;
  lhs::ExperimentConfig cfg;
  std::string config_path;

  auto* axioms = app.add_subcommand("axioms", "check the exhaustion, quasi-triangle and doubling axioms");
  axioms->add_option("--budget", o.budget, "triple budget for the exhaustive check");

  auto* cover = app.add_subcommand("cover", "Vitali selection on random admissible families and the finite ball cover");
  cover->add_option("--level", o.level);
  cover->add_option("--families", o.families);
  cover->add_option("--balls", o.balls);
  cover->add_option("--k", o.k, "cube generation for the finite cover (0 = smallest admissible)");
  cover->add_option("--delta", o.delta);

  auto* cubes = app.add_subcommand("cubes", "build dyadic cubes and check their properties");
  cubes->add_option("--level", o.level);
  cubes->add_option("--delta", o.delta);
  cubes->add_option("--depth", o.depth, "number of generations or 'atomic'");
  cubes->add_option("--budget", o.budget);

  auto* maximal = app.add_subcommand("maximal", "local maximal function with weak/strong type checks");
  maximal->add_option("--level", o.level);
  maximal->add_option("--p", o.p);

  auto* sharp = app.add_subcommand("sharp", "dyadic vs ball sharp maximal function");
  auto* cz = app.add_subcommand("cz", "Calderon-Zygmund stopping-time families");
  auto* fs = app.add_subcommand("fs", "local Fefferman-Stein inequality");
  for (auto* sc : {sharp, cz, fs}) {
    sc->add_option("--level", o.level);
    sc->add_option("--delta", o.delta);
    sc->add_option("--depth", o.depth, "number of generations or 'atomic'");
    sc->add_option("--k0", o.k0, "generation of the root cube");
  }
  cz->add_option("--lambda-grid", o.lambda_grid, "thresholds")->delimiter(',');
  fs->add_option("--p", o.ps, "exponents")->delimiter(',');
  fs->add_option("--sharp", o.sharp, "dyadic, ball")->delimiter(',');

  auto* bmo = app.add_subcommand("bmo", "BMO and BMO^p seminorms and their equivalence");
  bmo->add_option("--level", o.level);
  bmo->add_option("--p", o.ps, "exponents")->delimiter(',');

  auto* jn = app.add_subcommand("jn", "John-Nirenberg construction and distribution bound");
  jn->add_option("--level", o.level);
  jn->add_option("--steps", o.steps);
  jn->add_option("--lambda0", o.lambda0, "override the threshold (0 = measured)");
  jn->add_option("--lambda-grid", o.lambda_grid, "thresholds for the distribution table")->delimiter(',');

  auto* suite = app.add_subcommand("suite", "run every check over all function fixtures");
  auto* run = app.add_subcommand("run", "run a JSON experiment config");
  run->add_option("config", config_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

#ifdef _OPENMP
  if (g.threads > 0) omp_set_num_threads(g.threads);
#endif

  try {
    if (*run) {
      cfg = lhs::load_config(config_path);
    } else if (*suite) {
      cfg = lhs::suite_config(g.space, g.out, g.seed);
      cfg.formats = g.formats;
    } else {
      cfg.space = g.space;
      cfg.function = g.function;
      cfg.out = g.out;
      cfg.seed = g.seed;
      cfg.formats = g.formats;
      lhs::Step st;
      if (*axioms) {
        st = {"axioms", {{"budget", o.budget}}};
      } else if (*cover) {
        cfg.pipeline.push_back({"vitali", {{"n", o.level}, {"families", o.families}, {"balls", o.balls}}});
        st = {"cover", {{"n", o.level}, {"k", o.k}, {"delta", o.delta}}};
      } else if (*cubes) {
        st = {"cubes", forest_params(o)};
        st.params["budget"] = o.budget;
      } else if (*maximal) {
        st = {"maximal", {{"n", o.level}, {"p", o.p}}};
      } else if (*sharp) {
        st = {"sharp", forest_params(o)};
      } else if (*cz) {
        st = {"cz", forest_params(o)};
        if (!o.lambda_grid.empty()) st.params["lambdas"] = o.lambda_grid;
      } else if (*fs) {
        st = {"fs", forest_params(o)};
        if (!o.ps.empty()) st.params["p"] = o.ps;
        if (!o.sharp.empty()) st.params["sharp"] = o.sharp;
      } else if (*bmo) {
        st = {"bmo", {{"n", o.level}}};
        if (!o.ps.empty()) st.params["p"] = o.ps;
      } else if (*jn) {
        st = {"jn", {{"n", o.level}, {"steps", o.steps}, {"lambda0", o.lambda0}}};
        if (!o.lambda_grid.empty()) st.params["lambda_grid"] = o.lambda_grid;
      }
      cfg.pipeline.push_back(std::move(st));
    }
    const auto res = lhs::run_experiment(cfg);
    for (const auto& s : res.summary.at("steps")) {
      std::printf("%-4s %-10s %-22s %s\n", s.at("pass").get<bool>() ? "ok" : "FAIL",
                  s.at("op").get<std::string>().c_str(), s.at("function").get<std::string>().c_str(),
                  s.at("required").get<bool>() ? "" : "(advisory)");
    }
    std::printf("reports: %s\n", res.dir.string().c_str());
    return res.exit_code;
  } catch (const lhs::UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const lhs::ConfigurationError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const lhs::ArgumentError& e) {
    std::fprintf(stderr, "argument error: %s\n", e.what());
    return 2;
  } catch (const lhs::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
