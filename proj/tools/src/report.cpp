#include "report.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "options.hpp"

namespace dlg::cli {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, p);
}

namespace {

template <typename T>
std::string cell(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_floating_point_v<T>) {
    return format_number(*v);
  } else {
    return std::to_string(*v);
  }
}

template <typename T>
nlohmann::json jcell(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json jnumber(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

}  // namespace

std::string to_csv(const nlohmann::json& config, const std::vector<Row>& rows) {
  std::ostringstream out;
  out << "# dlg " << config["version"].get<std::string>() << "\n";
  out << "# config " << config.dump() << "\n";
  out << "d,L,N,K,seed,quantity,value,method,residual\n";
  for (const Row& r : rows) {
    out << cell(r.d) << ',' << cell(r.L) << ',' << cell(r.N) << ',' << cell(r.K) << ',' << cell(r.seed) << ','
        << r.quantity << ',' << format_number(r.value) << ',' << r.method << ',' << cell(r.residual) << '\n';
  }
  return out.str();
}

nlohmann::json to_json(const nlohmann::json& config, const Report& report) {
  nlohmann::json doc;
  doc["version"] = config["version"];
  doc["config"] = config;
  doc["columns"] = {"d", "L", "N", "K", "seed", "quantity", "value", "method", "residual"};
  doc["rows"] = nlohmann::json::array();
  for (const Row& r : report.rows) {
    nlohmann::json row;
    row["d"] = jcell(r.d);
    row["L"] = jcell(r.L);
    row["N"] = jcell(r.N);
    row["K"] = r.K ? jnumber(*r.K) : nlohmann::json(nullptr);
    row["seed"] = jcell(r.seed);
    row["quantity"] = r.quantity;
    row["value"] = jnumber(r.value);
    row["method"] = r.method;
    row["residual"] = r.residual ? jnumber(*r.residual) : nlohmann::json(nullptr);
    doc["rows"].push_back(row);
  }
  doc["summary"] = report.summary;
  doc["pass"] = report.pass;
  return doc;
}

std::vector<std::string> write_report(const nlohmann::json& config, const Report& report) {
  const std::string out = config["out"];
  const std::string format = config["format"];
  if (out == "-") {
    std::cout << to_csv(config, report.rows);
    return {"-"};
  }
  const std::filesystem::path dir = config["output-dir"].get<std::string>();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw UsageError("output-dir", "cannot create '" + dir.string() + "': " + ec.message());
  std::vector<std::string> written;
  auto emit = [&](const std::string& ext, const std::string& content) {
    const auto path = dir / (out + ext);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("out", "cannot write '" + path.string() + "'");
    f << content;
    written.push_back(path.string());
  };
  if (format == "csv" || format == "both") emit(".csv", to_csv(config, report.rows));
  if (format == "json" || format == "both") emit(".json", to_json(config, report).dump(2) + "\n");
  return written;
}

}  // namespace dlg::cli
