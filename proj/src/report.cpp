#include "lhs/report.hpp"

#include <cmath>
#include <limits>

namespace lhs {

Json jnum(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double safe_ratio(double num, double den) {
  if (den == 0.0) {
    return num == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  }
  return num / den;
}

Json VerificationReport::to_json() const {
  Json j;
  j["check"] = check;
  j["anchor"] = anchor;
  j["pass"] = pass;
  j["data"] = data;
  Json t = Json::object();
  for (const auto& table : tables) {
    Json rows = Json::array();
    for (const auto& row : table.rows) {
      Json r = Json::array();
      for (double v : row) r.push_back(jnum(v));
      rows.push_back(std::move(r));
    }
    t[table.name] = {{"columns", table.columns}, {"rows", std::move(rows)}};
  }
  j["tables"] = std::move(t);
  return j;
}

}  // namespace lhs
