#pragma once

// Experiment driver: a config names a space, a function and an ordered list
// of verification steps; running it writes one JSON report per step and a
// summary into a directory named by the hash of the config.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lhs/io.hpp"
#include "lhs/report.hpp"

namespace lhs {

struct Step {
  std::string op;
  /// Operation parameters. "function" overrides the experiment function and
  /// "required": false keeps a failing step from failing the run.
  Json params = Json::object();
};

struct ExperimentConfig {
  std::string space = "grid1d";
  std::string function = "log_singularity";
  std::vector<Step> pipeline;
  std::string out = "runs";
  std::uint64_t seed = 7;
  std::vector<std::string> formats{"json", "csv"};
};

/// axioms, cubes, vitali, cover, maximal, sharp, cz, fs, corollary, bmo, jn.
const std::vector<std::string>& operation_names();

/// Throws UsageError naming the offending field.
ExperimentConfig parse_config(const Json& j);
/// Parse errors carry the line and column of the JSON text.
ExperimentConfig load_config(const std::string& path);
Json config_to_json(const ExperimentConfig& config);
/// 16 hex digits of FNV-1a over the canonical config (output dir excluded).
std::string config_hash(const ExperimentConfig& config);

/// The fixed pipeline run by `suite`.
ExperimentConfig suite_config(const std::string& space, const std::string& out, std::uint64_t seed);

struct StepResult {
  std::string op;
  std::string function;
  bool required = true;
  bool pass = true;
  std::string error;
  std::vector<VerificationReport> reports;
  /// Step-level CSV rows (e.g. one row per (function, p) for fs).
  Table summary;

  Json to_json() const;
};

StepResult run_step(const Instance& inst, const Step& step, const std::string& default_function,
                    std::uint64_t seed);

struct RunResult {
  int exit_code = 0;
  std::filesystem::path dir;
  Json summary;
};

RunResult run_experiment(const ExperimentConfig& config);

/// Writes `stem.json`, `stem_<table>.csv` or `stem_<table>.svg`. Tables
/// need csv/svg; a report without tables only supports json.
void emit_report(const VerificationReport& report, const std::string& format,
                 const std::filesystem::path& stem);
void write_csv(const Table& table, const std::filesystem::path& path);
void write_svg(const Table& table, const std::filesystem::path& path);

}  // namespace lhs
