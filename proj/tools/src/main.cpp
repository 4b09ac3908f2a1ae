// dlg: command line driver for gap scans, certificates and simulations.
//
// Exit codes: 0 pass, 1 certificate failure, 2 usage error, 3 numerical
// nonconvergence.

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "dlg/error.hpp"
#include "dlg/version.hpp"
#include "options.hpp"
#include "report.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNonconvergence = 3;

}  // namespace

int main(int argc, char** argv) {
  using namespace dlg::cli;
  const json defaults = default_config();

  CLI::App app{"Spectral gaps, comparison certificates and kinetic Monte Carlo for disordered lattice gases"};
  app.set_version_flag("--version", std::string("dlg ") + std::string(dlg::kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  app.add_option("--config", config_path, "JSON configuration file (flags override it)");
  SectionFlags global_flags, threshold_flags;
  register_flags(app, defaults, global_flags);
  register_flags(app, defaults["thresholds"], threshold_flags);

  const std::map<std::string, std::string> descriptions{
      {"gap-scan", "Kawasaki spectral gap and gap*L^2 band over lattice sizes"},
      {"verify", "pencil certificates (--lemma 1|2) and the Bernoulli-Laplace constant (--thm 1)"},
      {"kmc", "kinetic Monte Carlo: --check-equilibrium, --relax or --two-block"},
      {"two-block", "equilibrium two-block statistic by exact sampling, plus the density functional"},
      {"congestion", "canonical-path congestion counts"},
  };
  std::map<std::string, SectionFlags> sub_flags;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, text] : descriptions) {
    subs[name] = app.add_subcommand(name, text);
    register_flags(*subs[name], defaults[name], sub_flags[name]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  std::string name;
  for (const auto& [n, sub] : subs)
    if (sub->parsed()) name = n;

  try {
    const json config =
        resolve_config(name, config_path, app, global_flags, threshold_flags, *subs[name], sub_flags[name]);
    Report report;
    if (name == "gap-scan") report = run_gap_scan(config);
    else if (name == "verify") report = run_verify(config);
    else if (name == "kmc") report = run_kmc(config);
    else if (name == "two-block") report = run_two_block(config);
    else report = run_congestion(config);

    const auto written = write_report(config, report);
    std::ostream& log = config["out"] == "-" ? std::cerr : std::cout;
    for (const auto& line : report.messages) log << line << "\n";
    for (const auto& path : written)
      if (path != "-") log << "wrote " << path << "\n";
    if (report.nonconvergent) return kExitNonconvergence;
    return report.pass ? kExitPass : kExitFailure;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const dlg::NonConvergence& e) {
    std::cerr << "nonconvergence: " << e.what() << " (residual " << e.residual() << ")\n";
    return kExitNonconvergence;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
