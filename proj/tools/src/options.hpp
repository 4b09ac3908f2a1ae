#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace dlg::cli {

using nlohmann::json;

// Invalid configuration or flag value; carries the offending field.
class UsageError : public std::runtime_error {
 public:
  UsageError(const std::string& field, const std::string& message)
      : std::runtime_error("invalid " + field + ": " + message), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Built-in defaults (identical to config/default.json).
json default_config();

// String storage for every flag of one section; the defaults decide the type.
struct SectionFlags {
  std::map<std::string, std::string> values;
  std::map<std::string, bool> switches;
  std::vector<std::string> keys;
};

// Adds one "--key" flag per default entry of `section` to `app`.
void register_flags(CLI::App& app, const json& section, SectionFlags& flags);

// Defaults, then the config file, then explicitly given flags. Fills derived
// values (output directory from DLG_OUTPUT_DIR, thread count) and returns the
// document echoed into every output.
json resolve_config(const std::string& subcommand, const std::string& config_path, const CLI::App& global,
                    const SectionFlags& global_flags, const SectionFlags& threshold_flags, const CLI::App& sub,
                    const SectionFlags& sub_flags);

// "4..14", "8,16,32" or mixtures such as "2..4,10".
std::vector<int> parse_int_list(const std::string& field, const std::string& text);

// Accepts "1e6"-style input as long as the value is integral.
std::int64_t parse_integer(const std::string& field, const std::string& text);
double parse_real(const std::string& field, const std::string& text);

// Typed access with the field named on failure.
std::int64_t get_int(const json& params, const std::string& key);
double get_real(const json& params, const std::string& key);
std::string get_string(const json& params, const std::string& key);
bool get_bool(const json& params, const std::string& key);

}  // namespace dlg::cli
