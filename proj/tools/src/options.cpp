#include "options.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "defaults.hpp"
#include "dlg/version.hpp"

namespace dlg::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

// Converts a flag string to the JSON type of its default.
json typed_value(const std::string& field, const json& prototype, const std::string& text) {
  if (prototype.is_number_integer()) return parse_integer(field, text);
  if (prototype.is_number()) return parse_real(field, text);
  return text;
}

// Validates and merges one config-file object into the defaults.
void merge_section(const std::string& prefix, json& target, const json& source) {
  if (!source.is_object()) throw UsageError(prefix.empty() ? "config" : prefix, "expected an object");
  for (const auto& [key, value] : source.items()) {
    const std::string field = prefix.empty() ? key : prefix + "." + key;
    if (!target.contains(key)) throw UsageError(field, "unknown configuration key");
    json& slot = target[key];
    if (slot.is_object()) {
      merge_section(field, slot, value);
    } else if (slot.is_boolean()) {
      if (!value.is_boolean()) throw UsageError(field, "expected true or false");
      slot = value;
    } else if (slot.is_number_integer()) {
      if (value.is_number_integer()) {
        slot = value;
      } else if (value.is_number() && std::floor(value.get<double>()) == value.get<double>()) {
        slot = static_cast<std::int64_t>(value.get<double>());
      } else if (value.is_string()) {
        slot = parse_integer(field, value.get<std::string>());
      } else {
        throw UsageError(field, "expected an integer");
      }
    } else if (slot.is_number()) {
      if (value.is_number()) slot = value.get<double>();
      else if (value.is_string()) slot = parse_real(field, value.get<std::string>());
      else throw UsageError(field, "expected a number");
    } else {
      if (value.is_string()) slot = value;
      else if (value.is_number_integer()) slot = std::to_string(value.get<std::int64_t>());
      else throw UsageError(field, "expected a string");
    }
  }
}

void apply_flags(json& target, const CLI::App& app, const SectionFlags& flags) {
  for (const auto& key : flags.keys) {
    if (app.count("--" + key) == 0) continue;
    if (target[key].is_boolean()) {
      target[key] = flags.switches.at(key);
    } else {
      target[key] = typed_value("--" + key, target[key], flags.values.at(key));
    }
  }
}

}  // namespace

json default_config() { return json::parse(kDefaultConfigJson); }

void register_flags(CLI::App& app, const json& section, SectionFlags& flags) {
  for (const auto& [key, value] : section.items()) {
    if (value.is_object()) continue;
    flags.keys.push_back(key);
    if (value.is_boolean()) {
      app.add_flag("--" + key, flags.switches[key], "default: " + value.dump());
    } else {
      app.add_option("--" + key, flags.values[key], "default: " + value.dump());
    }
  }
}

json resolve_config(const std::string& subcommand, const std::string& config_path, const CLI::App& global,
                    const SectionFlags& global_flags, const SectionFlags& threshold_flags, const CLI::App& sub,
                    const SectionFlags& sub_flags) {
  json config = default_config();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw UsageError("--config", "cannot open '" + config_path + "'");
    json file;
    try {
      file = json::parse(in);
    } catch (const json::parse_error& e) {
      throw UsageError("--config", std::string("not valid JSON: ") + e.what());
    }
    merge_section("", config, file);
  }
  apply_flags(config, global, global_flags);
  apply_flags(config["thresholds"], global, threshold_flags);
  apply_flags(config[subcommand], sub, sub_flags);

  if (config["output-dir"].get<std::string>().empty()) {
    const char* env = std::getenv("DLG_OUTPUT_DIR");
    config["output-dir"] = env && *env ? std::string(env) : std::string(".");
  }
  if (config["out"].get<std::string>().empty()) config["out"] = subcommand;
  // The echo keeps the requested value (0 = available parallelism) so that
  // output files do not depend on the machine.
  if (config["threads"].get<std::int64_t>() < 0) throw UsageError("threads", "must be >= 0");
  const std::string format = config["format"];
  if (format != "csv" && format != "json" && format != "both") throw UsageError("format", "expected csv, json or both");

  json resolved;
  resolved["version"] = std::string(kVersion);
  resolved["subcommand"] = subcommand;
  resolved["threads"] = config["threads"];
  resolved["output-dir"] = config["output-dir"];
  resolved["out"] = config["out"];
  resolved["format"] = config["format"];
  resolved["thresholds"] = config["thresholds"];
  resolved["params"] = config[subcommand];
  return resolved;
}

std::int64_t parse_integer(const std::string& field, const std::string& raw) {
  const std::string text = trim(raw);
  std::int64_t v = 0;
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec == std::errc() && p == text.data() + text.size() && !text.empty()) return v;
  const double d = parse_real(field, text);
  if (std::floor(d) != d || std::abs(d) > 9.0e15) throw UsageError(field, "expected an integer, got '" + raw + "'");
  return static_cast<std::int64_t>(d);
}

double parse_real(const std::string& field, const std::string& raw) {
  const std::string text = trim(raw);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size() || text.empty() || !std::isfinite(v))
    throw UsageError(field, "expected a number, got '" + raw + "'");
  return v;
}

std::vector<int> parse_int_list(const std::string& field, const std::string& text) {
  std::vector<int> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string item = trim(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (item.empty()) throw UsageError(field, "empty entry in list '" + text + "'");
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(static_cast<int>(parse_integer(field, item)));
    } else {
      const auto lo = parse_integer(field, item.substr(0, dots));
      const auto hi = parse_integer(field, item.substr(dots + 2));
      if (hi < lo) throw UsageError(field, "empty range '" + item + "'");
      if (hi - lo > 100000) throw UsageError(field, "range too long '" + item + "'");
      for (auto v = lo; v <= hi; ++v) out.push_back(static_cast<int>(v));
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::int64_t get_int(const json& params, const std::string& key) {
  const json& v = params.at(key);
  if (v.is_number_integer()) return v.get<std::int64_t>();
  return parse_integer(key, v.is_string() ? v.get<std::string>() : v.dump());
}

double get_real(const json& params, const std::string& key) {
  const json& v = params.at(key);
  if (v.is_number()) return v.get<double>();
  return parse_real(key, v.is_string() ? v.get<std::string>() : v.dump());
}

std::string get_string(const json& params, const std::string& key) {
  const json& v = params.at(key);
  return v.is_string() ? v.get<std::string>() : v.dump();
}

bool get_bool(const json& params, const std::string& key) { return params.at(key).get<bool>(); }

}  // namespace dlg::cli
