#pragma once

#include "json.hpp"
#include "report.hpp"

namespace dlg::cli {

// Each command reads config["params"] and config["thresholds"].
Report run_gap_scan(const nlohmann::json& config);
Report run_verify(const nlohmann::json& config);
Report run_kmc(const nlohmann::json& config);
Report run_two_block(const nlohmann::json& config);
Report run_congestion(const nlohmann::json& config);

}  // namespace dlg::cli
