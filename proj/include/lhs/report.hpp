#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace lhs {

using Json = nlohmann::json;

/// Flat numeric table carried by a report (serialized as CSV).
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Outcome of one verification step: measured constants, pass/fail flags
/// and witness data. `anchor` names the statement being checked.
struct VerificationReport {
  std::string check;
  std::string anchor;
  bool pass = true;
  Json data = Json::object();
  std::vector<Table> tables;

  Json to_json() const;
};

/// JSON number that survives serialization of non-finite values
/// (inf -> "inf", nan -> "nan").
Json jnum(double x);

/// Ratio with the 0/0 -> 1 convention; x/0 with x > 0 is +inf.
double safe_ratio(double num, double den);

}  // namespace lhs
