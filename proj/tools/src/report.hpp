#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace dlg::cli {

// One output row: d,L,N,K,seed,quantity,value,method,residual. Empty optional
// fields are written as empty CSV cells and JSON nulls.
struct Row {
  std::optional<int> d;
  std::optional<int> L;
  std::optional<int> N;
  std::optional<double> K;
  std::optional<std::uint64_t> seed;
  std::string quantity;
  double value = 0.0;
  std::string method;
  std::optional<double> residual;
};

struct Report {
  std::vector<Row> rows;
  nlohmann::json summary = nlohmann::json::object();
  bool pass = true;
  bool nonconvergent = false;
  std::vector<std::string> messages;  // human-readable summary lines
};

// Shortest decimal that round-trips.
std::string format_number(double value);

std::string to_csv(const nlohmann::json& config, const std::vector<Row>& rows);
nlohmann::json to_json(const nlohmann::json& config, const Report& report);

// Writes <output-dir>/<out>.csv and/or .json per the resolved config; "-" as
// `out` sends CSV to stdout. Returns the paths written.
std::vector<std::string> write_report(const nlohmann::json& config, const Report& report);

}  // namespace dlg::cli
