#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "dlg/disorder.hpp"
#include "dlg/ensemble.hpp"
#include "dlg/error.hpp"
#include "dlg/forms.hpp"
#include "dlg/kmc.hpp"
#include "dlg/lattice.hpp"
#include "dlg/spectra.hpp"
#include "dlg/statistics.hpp"
#include "dlg/two_block.hpp"
#include "options.hpp"
#include "pool.hpp"

namespace dlg::cli {
namespace {

using nlohmann::json;

constexpr std::size_t kEnumerableStates = 200000;

// Per-purpose stream seeds derived from the replicate seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose, int d, int L) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(purpose), static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(L)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

enum Purpose : std::uint64_t { kField = 1, kInitial = 2, kDynamics = 3, kSampling = 4, kDensity = 5 };

struct Common {
  int d = 1;
  std::vector<int> sizes;
  double K = 0.0;
  std::uint64_t seed = 0;
  int seeds = 1;
};

Common read_common(const json& p, const std::string& size_key = "L") {
  Common c;
  c.d = p.contains("d") ? static_cast<int>(get_int(p, "d")) : 1;
  if (c.d < 1 || c.d > 3) throw UsageError("--d", "must be 1, 2 or 3");
  c.sizes = parse_int_list("--" + size_key, get_string(p, size_key));
  for (int L : c.sizes)
    if (L < 1) throw UsageError("--" + size_key, "sizes must be >= 1, got " + std::to_string(L));
  c.K = get_real(p, "K");
  if (c.K < 0.0) throw UsageError("--K", "must be >= 0");
  const auto s = get_int(p, "seed");
  if (s < 0) throw UsageError("--seed", "must be >= 0");
  c.seed = static_cast<std::uint64_t>(s);
  const auto n = get_int(p, "seeds");
  if (n < 1) throw UsageError("--seeds", "must be >= 1");
  c.seeds = static_cast<int>(n);
  return c;
}

Boundary read_boundary(const std::string& text, Boundary automatic) {
  if (text == "auto") return automatic;
  if (text == "free") return Boundary::kFree;
  if (text == "periodic") return Boundary::kPeriodic;
  throw UsageError("--boundary", "expected free, periodic or auto");
}

LatticeGeometry make_geometry(int d, int L, Boundary bc) {
  if (bc == Boundary::kPeriodic && L < 2) throw UsageError("--L", "periodic boundary needs L >= 2");
  std::size_t sites = 1;
  for (int a = 0; a < d; ++a) {
    sites *= static_cast<std::size_t>(L);
    if (sites > 1000000) throw UsageError("--L", "lattice too large");
  }
  return build_box(d, L, bc);
}

// Particle numbers for a lattice of `sites` sites: "half", "all" or a list.
std::vector<int> particle_numbers(const std::string& rule, std::size_t sites) {
  const int n = static_cast<int>(sites);
  if (rule == "half") return {n / 2};
  if (rule == "all") {
    std::vector<int> out;
    for (int N = 1; N < n; ++N) out.push_back(N);
    return out;
  }
  auto list = parse_int_list("--N", rule);
  for (int N : list)
    if (N < 0 || N > n) throw UsageError("--N", std::to_string(N) + " outside [0, " + std::to_string(n) + "]");
  return list;
}

DisorderField make_field(const LatticeGeometry& geom, double K, std::uint64_t seed) {
  if (K == 0.0) return DisorderField::zero(geom.site_count());
  return generate_iid(geom, K, derive_seed(seed, kField, geom.dimension(), geom.side_lengths()[0]));
}

SolveMethod read_method(const std::string& text) {
  if (text == "auto") return SolveMethod::kAuto;
  if (text == "dense") return SolveMethod::kDense;
  if (text == "iterative") return SolveMethod::kIterative;
  throw UsageError("--method", "expected auto, dense or iterative");
}

std::size_t states_of(std::size_t sites, int N) {
  if (sites > static_cast<std::size_t>(kMaxEnumeratedSites)) return SIZE_MAX;
  try {
    return binomial_coefficient(static_cast<int>(sites), N);
  } catch (const std::overflow_error&) {
    return SIZE_MAX;
  }
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

std::size_t threads_of(const json& config) {
  const auto requested = config["threads"].get<std::int64_t>();
  if (requested > 0) return static_cast<std::size_t>(requested);
  return std::max(1u, std::thread::hardware_concurrency());
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

// Strictly decreasing per-size means; summary rows appended to the report.
bool decreasing_trend(Report& report, const std::map<int, std::vector<double>>& per_size, double K,
                      const std::string& quantity) {
  std::vector<double> means;
  json table = json::array();
  for (const auto& [L, values] : per_size) {
    const double m = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    means.push_back(m);
    report.rows.push_back({.L = L, .K = K, .quantity = quantity + "_mean", .value = m, .method = "average"});
    table.push_back({{"L", L}, {"mean", m}});
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < means.size(); ++i) decreasing = decreasing && means[i] < means[i - 1];
  report.summary["per_size"] = table;
  report.summary["strictly_decreasing"] = decreasing;
  std::string line = quantity + " by size:";
  for (const auto& [L, values] : per_size) {
    (void)values;
    line += " L=" + std::to_string(L);
  }
  line += " ->";
  for (double m : means) line += " " + fixed(m);
  line += decreasing ? " (strictly decreasing)" : " (not strictly decreasing)";
  report.messages.push_back(line);
  return decreasing;
}

}  // namespace

Report run_gap_scan(const json& config) {
  const json& p = config["params"];
  const json& th = config["thresholds"];
  const Common c = read_common(p);
  const Boundary bc = read_boundary(get_string(p, "boundary"), Boundary::kFree);
  const std::string N_rule = get_string(p, "N");
  GapOptions options;
  options.method = read_method(get_string(p, "method"));
  options.residual_tolerance = get_real(th, "residual");

  std::vector<Thm3Instance> instances;
  for (int L : c.sizes) {
    const auto geom = make_geometry(c.d, L, bc);
    for (int N : particle_numbers(N_rule, geom.site_count())) {
      if (states_of(geom.site_count(), N) > ConfigSpace::kMaxDimension)
        throw UsageError("--L", "L=" + std::to_string(L) + " with N=" + std::to_string(N) + " is too large to enumerate");
      for (int r = 0; r < c.seeds; ++r) {
        const std::uint64_t seed = c.seed + static_cast<std::uint64_t>(r);
        instances.push_back({geom, make_field(geom, c.K, seed), N, seed});
      }
    }
  }
  const auto rows = parallel_map(instances.size(), threads_of(config), [&](std::size_t i) {
    return certify_thm3(std::span<const Thm3Instance>(&instances[i], 1), options).front();
  });

  Report report;
  for (const auto& r : rows) {
    if (r.excluded) {
      report.rows.push_back({r.d, r.L, r.N, r.K, r.seed, "excluded", 0.0, r.note,
                             r.note == "nonconvergent" ? std::optional<double>(r.residual) : std::nullopt});
      if (r.note == "nonconvergent") report.nonconvergent = true;
      continue;
    }
    const std::string method(to_string(r.method));
    report.rows.push_back({r.d, r.L, r.N, r.K, r.seed, "gap", r.gap, method, r.residual});
    report.rows.push_back({r.d, r.L, r.N, r.K, r.seed, "gap_L2", r.scaled, method, r.residual});
  }
  const double allowed = get_real(th, "band-ratio") * std::exp(get_real(th, "band-disorder-exponent") * c.K);
  const BandCheck band = thm3_band(rows, allowed);
  report.rows.push_back({.d = c.d, .K = c.K, .quantity = "band_ratio", .value = band.ratio, .method = "max/min"});
  report.rows.push_back({.d = c.d, .K = c.K, .quantity = "band_allowed", .value = allowed, .method = "threshold"});
  report.summary = {{"band_min", band.min}, {"band_max", band.max}, {"band_ratio", band.ratio},
                    {"band_allowed", allowed}, {"instances", rows.size()}};
  report.pass = band.pass;
  if (rows.size() == 1 && !rows[0].excluded)
    report.messages.push_back("gap " + format_number(rows[0].gap) + " (" + std::string(to_string(rows[0].method)) + ")");
  report.messages.push_back("gap*L^2 band ratio " + fixed(band.ratio) + " (allowed " + fixed(allowed) + ") over " +
                            std::to_string(rows.size()) + " instances: " + (band.pass ? "PASS" : "FAIL"));
  return report;
}

namespace {

std::vector<std::pair<std::string, std::vector<double>>> weight_families(const std::string& list, int k) {
  std::vector<std::pair<std::string, std::vector<double>>> out;
  const int m = k - 1;
  std::stringstream ss(list);
  std::string name;
  while (std::getline(ss, name, ',')) {
    std::vector<double> rho(m);
    if (name == "uniform") {
      std::fill(rho.begin(), rho.end(), 1.0 / m);
    } else if (name == "rising") {
      for (int x = 0; x < m; ++x) rho[x] = x + 1.0;
      const double s = std::accumulate(rho.begin(), rho.end(), 0.0);
      for (double& r : rho) r /= s;
    } else if (name == "falling") {
      for (int x = 0; x < m; ++x) rho[x] = 1.0 / (x + 1.0);
      const double s = std::accumulate(rho.begin(), rho.end(), 0.0);
      for (double& r : rho) r *= 0.9 / s;
    } else {
      throw UsageError("--weights", "unknown weight family '" + name + "' (uniform, rising, falling)");
    }
    out.emplace_back(name, rho);
  }
  if (out.empty()) throw UsageError("--weights", "no weight family given");
  return out;
}

struct PencilOutcome {
  std::vector<Row> rows;
  bool pass = true;
  double ratio = 0.0;   // lambda / bound
  double margin = 0.0;  // bound - lambda
  bool kernel_error = false;
};

// `sharp_bound` adds a second, tighter bound when finite.
PencilOutcome pencil_rows(Row key, const std::string& label, const std::function<PencilResult()>& run,
                          double sharp_bound, double slack) {
  PencilOutcome o;
  try {
    const PencilResult r = run();
    const std::string method(to_string(r.method));
    Row row = key;
    row.quantity = "lambda_max" + label;
    row.value = r.lambda_max;
    row.method = method;
    row.residual = r.residual;
    o.rows.push_back(row);
    row.quantity = "bound" + label;
    row.value = r.bound;
    row.residual.reset();
    o.rows.push_back(row);
    o.pass = r.pass;
    o.ratio = r.lambda_max / r.bound;
    o.margin = r.bound - r.lambda_max;
    if (std::isfinite(sharp_bound)) {
      row.quantity = "bound_sharp" + label;
      row.value = sharp_bound;
      o.rows.push_back(row);
      o.pass = o.pass && r.lambda_max <= sharp_bound + slack;
      o.margin = std::min(o.margin, sharp_bound - r.lambda_max);
    }
  } catch (const KernelContainmentError& e) {
    Row row = key;
    row.quantity = "kernel_containment_error" + label;
    row.value = std::nan("");
    row.method = "error";
    o.rows.push_back(row);
    o.pass = false;
    o.kernel_error = true;
  }
  return o;
}

void summarize_pencils(Report& report, const std::vector<PencilOutcome>& outcomes, const std::string& name) {
  double worst_ratio = 0.0, min_margin = 1e300;
  std::size_t failures = 0, kernel_errors = 0;
  for (const auto& o : outcomes) {
    report.rows.insert(report.rows.end(), o.rows.begin(), o.rows.end());
    if (!o.kernel_error) {
      worst_ratio = std::max(worst_ratio, o.ratio);
      min_margin = std::min(min_margin, o.margin);
    }
    failures += !o.pass;
    kernel_errors += o.kernel_error;
  }
  report.pass = failures == 0;
  report.summary = {{"certificate", name},       {"instances", outcomes.size()}, {"failures", failures},
                    {"kernel_errors", kernel_errors}, {"worst_ratio", worst_ratio}, {"min_slack", min_margin}};
  report.rows.push_back({.quantity = "worst_lambda_over_bound", .value = worst_ratio, .method = "max"});
  report.rows.push_back({.quantity = "min_slack", .value = min_margin, .method = "min"});
  report.messages.push_back(name + ": " + std::to_string(outcomes.size()) + " pencils, worst lambda/bound " +
                            fixed(worst_ratio, 6) + ", min slack " + fixed(min_margin, 6) + ", " +
                            std::to_string(failures) + " failures (" + std::to_string(kernel_errors) +
                            " kernel-containment errors): " + (report.pass ? "PASS" : "FAIL"));
}

}  // namespace

Report run_verify(const json& config) {
  const json& p = config["params"];
  const json& th = config["thresholds"];
  const double slack = get_real(th, "slack");
  const auto lemma = get_int(p, "lemma");
  const auto thm = get_int(p, "thm");
  if ((lemma != 0) == (thm != 0)) throw UsageError("--lemma/--thm", "choose exactly one of --lemma 1|2 or --thm 1");
  if (lemma != 0 && lemma != 1 && lemma != 2) throw UsageError("--lemma", "expected 1 or 2");
  if (thm != 0 && thm != 1) throw UsageError("--thm", "expected 1");
  std::string N_rule = get_string(p, "N");
  const std::size_t threads = threads_of(config);
  Report report;

  if (lemma == 2) {
    if (N_rule == "auto") N_rule = "all";
    const auto ks = parse_int_list("--k", get_string(p, "k"));
    struct Job {
      int k, N;
      std::string label;
      std::vector<double> rho;
    };
    std::vector<Job> jobs;
    for (int k : ks) {
      if (k < 2 || k > 20) throw UsageError("--k", "segment length must lie in [2, 20]");
      for (int N : particle_numbers(N_rule, k))
        for (auto& [name, rho] : weight_families(get_string(p, "weights"), k)) jobs.push_back({k, N, ":" + name, rho});
    }
    const auto outcomes = parallel_map(jobs.size(), threads, [&](std::size_t i) {
      const Job& j = jobs[i];
      return pencil_rows({.d = 1, .L = j.k, .N = j.N, .K = 0.0}, j.label,
                         [&] { return certify_lemma2(j.k, j.N, j.rho, slack); }, HUGE_VAL, slack);
    });
    summarize_pencils(report, outcomes, "homogeneous pencil certificate");
    return report;
  }

  const Common c = read_common(p, lemma == 1 ? "L" : "sizes");
  if (lemma == 1) {
    if (N_rule == "auto") N_rule = "all";
    struct Job {
      int L, N;
      std::uint64_t seed;
      DisorderField field;
    };
    std::vector<Job> jobs;
    for (int L : c.sizes) {
      if (L < 2 || L > 20) throw UsageError("--L", "segment length must lie in [2, 20]");
      const auto geom = make_geometry(1, L, Boundary::kFree);
      for (int r = 0; r < c.seeds; ++r) {
        const std::uint64_t seed = c.seed + static_cast<std::uint64_t>(r);
        const auto field = force_endpoints(quantize_to_grid(make_field(geom, c.K, seed), L).field);
        for (int N : particle_numbers(N_rule, L)) jobs.push_back({L, N, seed, field});
      }
    }
    const auto outcomes = parallel_map(jobs.size(), threads, [&](std::size_t i) {
      const Job& j = jobs[i];
      const double sharp = c.K == 0.0 ? j.L - 1.0 : HUGE_VAL;
      return pencil_rows({.d = 1, .L = j.L, .N = j.N, .K = c.K, .seed = j.seed}, "",
                         [&] { return certify_lemma1(j.L, j.N, j.field, slack); }, sharp, slack);
    });
    summarize_pencils(report, outcomes, "moving-particle certificate");
    return report;
  }

  // Bernoulli-Laplace constant |Lambda| / gap over sizes.
  if (N_rule == "auto") N_rule = "half";
  std::vector<Thm1Instance> instances;
  for (int n : c.sizes) {
    if (n < 2 || n > 20) throw UsageError("--sizes", "sizes must lie in [2, 20]");
    const auto geom = make_geometry(1, n, Boundary::kFree);
    for (int r = 0; r < c.seeds; ++r) {
      const std::uint64_t seed = c.seed + static_cast<std::uint64_t>(r);
      for (int N : particle_numbers(N_rule, n)) instances.push_back({make_field(geom, c.K, seed), N, seed});
    }
  }
  GapOptions options;
  options.residual_tolerance = get_real(th, "residual");
  const auto rows = parallel_map(instances.size(), threads, [&](std::size_t i) {
    return certify_thm1(std::span<const Thm1Instance>(&instances[i], 1), options).front();
  });
  for (const auto& r : rows) {
    const int L = static_cast<int>(r.sites);
    if (r.degenerate) {
      report.rows.push_back({1, L, r.N, r.K, r.seed, "excluded", 0.0, "degenerate", std::nullopt});
      continue;
    }
    const std::string method(to_string(r.method));
    report.rows.push_back({1, L, r.N, r.K, r.seed, "gap_bl", r.gap, method, r.residual});
    report.rows.push_back({1, L, r.N, r.K, r.seed, "c_emp", r.c_emp, method, r.residual});
  }
  const double factor = get_real(th, "trend-factor");
  const double spread_limit = get_real(th, "spread");
  const TrendCheck t = thm1_trend(rows, factor);
  for (const auto& [sites, value] : t.per_size)
    report.rows.push_back({.d = 1, .L = static_cast<int>(sites), .K = c.K, .quantity = "c_emp_max", .value = value,
                           .method = "max over seeds"});
  const bool spread_ok = c.K != 0.0 || t.spread <= spread_limit;
  report.pass = t.pass && spread_ok;
  report.rows.push_back({.K = c.K, .quantity = "trend_last_over_first", .value = t.last / t.first, .method = "ratio"});
  report.rows.push_back({.K = c.K, .quantity = "spread", .value = t.spread, .method = "(max-min)/min"});
  report.summary = {{"first", t.first},   {"last", t.last},          {"largest", t.largest},
                    {"spread", t.spread}, {"trend_factor", factor}, {"spread_limit", spread_limit},
                    {"trend_pass", t.pass}, {"spread_checked", c.K == 0.0}};
  report.messages.push_back("C_emp per size (max over seeds):");
  for (const auto& [sites, value] : t.per_size)
    report.messages.push_back("  |Lambda|=" + std::to_string(sites) + "  C_emp=" + fixed(value, 6));
  report.messages.push_back("trend last/first " + fixed(t.last / t.first) + " (allowed " + fixed(factor) +
                            "), spread " + fixed(t.spread) + (c.K == 0.0 ? " (allowed " + fixed(spread_limit) + ")" : "") +
                            ": " + (report.pass ? "PASS" : "FAIL"));
  return report;
}

namespace {

std::optional<DirectedCorruption> read_corruption(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::stringstream ss(text);
  std::string a, b, f;
  if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, f))
    throw UsageError("--corrupt", "expected from,to,factor");
  DirectedCorruption c;
  c.from = static_cast<Site>(parse_integer("--corrupt", a));
  c.to = static_cast<Site>(parse_integer("--corrupt", b));
  c.factor = parse_real("--corrupt", f);
  if (!(c.factor > 0.0)) throw UsageError("--corrupt", "factor must be positive");
  return c;
}

TwoBlockParams read_two_block(const json& p) {
  TwoBlockParams params;
  params.micro_radius = static_cast<int>(get_int(p, "Kwin"));
  params.delta = get_real(p, "delta");
  if (params.micro_radius < 1) throw UsageError("--Kwin", "must be >= 1");
  if (!(params.delta > 0.0) || params.delta > 0.5) throw UsageError("--delta", "must lie in (0, 1/2]");
  if (p.contains("F")) {
    const std::string F = get_string(p, "F");
    if (F == "linear") params.F = [](double rho) { return rho; };
    else if (F != "square") throw UsageError("--F", "expected square or linear");
  }
  return params;
}

void check_two_block_sizes(const std::vector<int>& sizes, const TwoBlockParams& params) {
  for (int L : sizes) {
    if (L < 2) throw UsageError("--L", "two-block needs L >= 2");
    const int R = macro_radius(L, params.delta);
    if (R < params.micro_radius)
      throw UsageError("--delta", "macro window floor(delta L) = " + std::to_string(R) + " is smaller than --Kwin at L=" +
                                      std::to_string(L));
  }
}

Occupancy initial_state(const LatticeGeometry& geom, const DisorderField& field, int N, std::uint64_t seed) {
  const CanonicalMeasure mu(field, N);
  return mu.exact_sample(derive_seed(seed, kInitial, geom.dimension(), geom.side_lengths()[0]));
}

void check_mobile(int N, std::size_t sites) {
  if (N <= 0 || static_cast<std::size_t>(N) >= sites)
    throw UsageError("--N", "frozen sector (N=" + std::to_string(N) + " on " + std::to_string(sites) +
                                " sites) has no dynamics");
}

}  // namespace

Report run_kmc(const json& config) {
  const json& p = config["params"];
  const json& th = config["thresholds"];
  const bool eq = get_bool(p, "check-equilibrium"), relax = get_bool(p, "relax"), tb = get_bool(p, "two-block");
  if (eq + relax + tb != 1)
    throw UsageError("--check-equilibrium/--relax/--two-block", "choose exactly one simulation mode");
  const Common c = read_common(p);
  const Boundary bc = read_boundary(get_string(p, "boundary"), tb ? Boundary::kPeriodic : Boundary::kFree);
  const std::string N_rule = get_string(p, "N");
  const std::size_t threads = threads_of(config);
  const double p_threshold = get_real(th, "p-value");

  struct Job {
    int L, N;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (int L : c.sizes) {
    const auto geom = make_geometry(c.d, L, bc);
    for (int N : particle_numbers(N_rule, geom.site_count())) {
      check_mobile(N, geom.site_count());
      for (int r = 0; r < c.seeds; ++r) jobs.push_back({L, N, c.seed + static_cast<std::uint64_t>(r)});
    }
  }
  Report report;

  if (eq) {
    const auto events = get_int(p, "events");
    if (events < 1) throw UsageError("--events", "must be >= 1");
    const auto corruption = read_corruption(get_string(p, "corrupt"));
    for (const Job& j : jobs) {
      const auto sites = static_cast<std::size_t>(std::pow(j.L, c.d));
      if (states_of(sites, j.N) > 10000) throw UsageError("--L", "equilibrium check needs at most 10^4 states");
      if (corruption && (corruption->from < 0 || corruption->to < 0 || static_cast<std::size_t>(corruption->from) >= sites ||
                         static_cast<std::size_t>(corruption->to) >= sites))
        throw UsageError("--corrupt", "site outside lattice");
    }
    struct Out {
      std::vector<Row> rows;
      bool pass = false;
      std::string status;
    };
    const auto outs = parallel_map(jobs.size(), threads, [&](std::size_t i) {
      const Job& j = jobs[i];
      const auto geom = make_geometry(c.d, j.L, bc);
      const auto field = make_field(geom, c.K, j.seed);
      const CanonicalMeasure mu(field, j.N);
      KmcOptions options;
      options.corruption = corruption;
      KmcState state(geom, field, initial_state(geom, field, j.N, j.seed),
                     derive_seed(j.seed, kDynamics, c.d, j.L), options);
      const auto eqr = equilibrium_check(state, mu, static_cast<std::uint64_t>(events), p_threshold);
      const auto catalog = state.revalidate();
      KmcState frozen(geom, field, initial_state(geom, field, j.N, j.seed), derive_seed(j.seed, kSampling, c.d, j.L));
      std::vector<double> waits(100000);
      for (double& w : waits) w = frozen.draw_waiting_time();
      const auto ks = ks_exponential(waits);
      Out o;
      const Row key{c.d, j.L, j.N, c.K, j.seed, "", 0.0, "kmc", std::nullopt};
      auto add = [&](const std::string& q, double v, const std::string& m) {
        Row r = key;
        r.quantity = q;
        r.value = v;
        r.method = m;
        o.rows.push_back(r);
      };
      add("chi2", eqr.statistic, "time-weighted");
      add("dof", eqr.dof, "time-weighted");
      add("effective_samples", eqr.effective_samples, "gap*T/2");
      add("p_value", eqr.p_value, to_string(eqr.status));
      add("ks_p_value", ks.p_value, "frozen catalog");
      add("catalog_mismatches", static_cast<double>(catalog.mismatched_slots), "rebuild");
      o.pass = eqr.status == CheckStatus::kPass && ks.p_value > p_threshold && catalog.mismatched_slots == 0;
      o.status = "L=" + std::to_string(j.L) + " N=" + std::to_string(j.N) + " seed=" + std::to_string(j.seed) +
                 ": chi2 p=" + fixed(eqr.p_value) + " (" + to_string(eqr.status) + "), KS p=" + fixed(ks.p_value) +
                 ", catalog mismatches " + std::to_string(catalog.mismatched_slots);
      return o;
    });
    for (const auto& o : outs) {
      report.rows.insert(report.rows.end(), o.rows.begin(), o.rows.end());
      report.pass = report.pass && o.pass;
      report.messages.push_back(o.status);
    }
    report.summary = {{"mode", "check-equilibrium"}, {"runs", outs.size()}, {"pass", report.pass}};
    report.messages.push_back(std::string("equilibrium check: ") + (report.pass ? "PASS" : "FAIL"));
    return report;
  }

  if (relax) {
    if (c.d != 1) throw UsageError("--d", "relaxation scan uses the first Fourier mode of a segment (d = 1)");
    if (bc != Boundary::kFree) throw UsageError("--boundary", "relaxation scan needs a free segment");
    const double horizon = get_real(p, "horizon"), grid = get_real(p, "grid");
    if (!(horizon > 0.0)) throw UsageError("--horizon", "must be positive");
    if (!(grid > 0.0) || grid >= horizon) throw UsageError("--grid", "must lie in (0, horizon)");
    const bool trajectory = get_bool(p, "trajectory");
    const double factor = get_real(th, "relax-factor");
    struct Out {
      std::vector<Row> rows;
      double tau = 0.0;
      bool pass = true;
      bool nonconvergent = false;
      std::string status;
      std::vector<double> series;
      double dt = 0.0;
    };
    GapOptions gap_options;
    gap_options.residual_tolerance = get_real(th, "residual");
    const auto outs = parallel_map(jobs.size(), threads, [&](std::size_t i) {
      const Job& j = jobs[i];
      const auto geom = make_geometry(1, j.L, bc);
      const auto field = make_field(geom, c.K, j.seed);
      KmcState state(geom, field, initial_state(geom, field, j.N, j.seed), derive_seed(j.seed, kDynamics, 1, j.L));
      const double scale = static_cast<double>(j.L) * j.L;
      Out o;
      o.dt = grid * scale;
      const auto r = relaxation_time(state, first_fourier_mode(j.L), horizon * scale, grid * scale,
                                     trajectory ? &o.series : nullptr);
      o.tau = r.tau;
      const Row key{1, j.L, j.N, c.K, j.seed, "", 0.0, "kmc", std::nullopt};
      auto add = [&](const std::string& q, double v, const std::string& m, std::optional<double> res = std::nullopt) {
        Row row = key;
        row.quantity = q;
        row.value = v;
        row.method = m;
        row.residual = res;
        o.rows.push_back(row);
      };
      add("tau", r.tau, r.inconclusive ? "inconclusive" : "integrated", r.tau_error);
      add("tau_exponential", r.exponential_tau, "lag-one");
      o.status = "L=" + std::to_string(j.L) + " N=" + std::to_string(j.N) + " seed=" + std::to_string(j.seed) +
                 ": tau=" + fixed(r.tau) + " +/- " + fixed(r.tau_error);
      if (r.inconclusive) {
        o.pass = false;
        o.status += " (inconclusive: horizon < 50 tau)";
      }
      if (states_of(geom.site_count(), j.N) <= kEnumerableStates) {
        try {
          const CanonicalMeasure mu(field, j.N);
          const auto g = spectral_gap(build_kawasaki(geom, make_measured_space(mu)).form, gap_options);
          add("inverse_gap", 1.0 / g.gap, std::string(to_string(g.method)), g.residual);
          add("tau_times_gap", r.tau * g.gap, "ratio");
          const bool within = r.tau * g.gap >= 1.0 / factor && r.tau * g.gap <= factor;
          o.pass = o.pass && within;
          o.status += ", 1/gap=" + fixed(1.0 / g.gap) + ", tau*gap=" + fixed(r.tau * g.gap) +
                      (within ? "" : " (outside factor " + fixed(factor) + ")");
        } catch (const NonConvergence& e) {
          o.nonconvergent = true;
          add("inverse_gap", std::nan(""), "nonconvergent", e.residual());
        }
      }
      return o;
    });
    std::map<int, std::vector<double>> taus;
    for (std::size_t i = 0; i < outs.size(); ++i) {
      const auto& o = outs[i];
      report.rows.insert(report.rows.end(), o.rows.begin(), o.rows.end());
      report.pass = report.pass && o.pass;
      report.nonconvergent = report.nonconvergent || o.nonconvergent;
      report.messages.push_back(o.status);
      taus[jobs[i].L].push_back(o.tau);
      if (trajectory) {
        const std::filesystem::path dir = config["output-dir"].get<std::string>();
        std::filesystem::create_directories(dir);
        const auto path = dir / (config["out"].get<std::string>() + "_trajectory_L" + std::to_string(jobs[i].L) + "_N" +
                                 std::to_string(jobs[i].N) + "_seed" + std::to_string(jobs[i].seed) + ".csv");
        std::ofstream f(path, std::ios::binary);
        f << "# dlg " << config["version"].get<std::string>() << "\n# config " << config.dump() << "\n";
        f << "time,observable\n";
        for (std::size_t k = 0; k < o.series.size(); ++k)
          f << format_number(static_cast<double>(k + 1) * o.dt) << ',' << format_number(o.series[k]) << '\n';
        report.messages.push_back("wrote " + path.string());
      }
    }
    report.summary = {{"mode", "relax"}, {"runs", outs.size()}};
    if (taus.size() >= 2) {
      std::vector<double> xs, ys;
      for (const auto& [L, v] : taus) {
        xs.push_back(L);
        ys.push_back(std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()));
      }
      const double slope = log_log_slope(xs, ys);
      const double target = get_real(th, "relax-slope"), tol = get_real(th, "relax-slope-tol");
      const bool ok = std::abs(slope - target) <= tol;
      report.pass = report.pass && ok;
      report.rows.push_back({.d = 1, .K = c.K, .quantity = "tau_loglog_slope", .value = slope, .method = "least squares"});
      report.summary["slope"] = slope;
      report.messages.push_back("log-log slope of tau(L) " + fixed(slope) + " (target " + fixed(target) + " +/- " +
                                fixed(tol) + ")");
    }
    report.messages.push_back(std::string("relaxation scan: ") + (report.pass ? "PASS" : "FAIL"));
    return report;
  }

  // Two-block statistic along Kawasaki trajectories started in equilibrium.
  const TwoBlockParams params = read_two_block(p);
  if (bc != Boundary::kPeriodic) throw UsageError("--boundary", "two-block statistic needs a periodic box");
  check_two_block_sizes(c.sizes, params);
  const auto samples = get_int(p, "samples");
  const double spacing = get_real(p, "spacing");
  if (samples < 2) throw UsageError("--samples", "must be >= 2");
  if (!(spacing > 0.0)) throw UsageError("--spacing", "must be positive");
  const auto estimates = parallel_map(jobs.size(), threads, [&](std::size_t i) {
    const Job& j = jobs[i];
    const auto geom = make_geometry(c.d, j.L, bc);
    const auto field = make_field(geom, c.K, j.seed);
    KmcState state(geom, field, initial_state(geom, field, j.N, j.seed), derive_seed(j.seed, kDynamics, c.d, j.L));
    return two_block_statistic(state, params, static_cast<std::size_t>(samples), spacing);
  });
  std::map<int, std::vector<double>> per_size;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const Job& j = jobs[i];
    report.rows.push_back({c.d, j.L, j.N, c.K, j.seed, "two_block", estimates[i].mean, "kmc", estimates[i].standard_error});
    per_size[j.L].push_back(estimates[i].mean);
  }
  report.pass = decreasing_trend(report, per_size, c.K, "two_block");
  report.summary["mode"] = "two-block";
  report.messages.push_back(std::string("two-block trend: ") + (report.pass ? "PASS" : "FAIL"));
  return report;
}

Report run_two_block(const json& config) {
  const json& p = config["params"];
  const Common c = read_common(p);
  const TwoBlockParams params = read_two_block(p);
  check_two_block_sizes(c.sizes, params);
  const auto samples = get_int(p, "samples");
  if (samples < 2) throw UsageError("--samples", "must be >= 2");
  const auto densities = get_int(p, "densities");
  if (densities < 0) throw UsageError("--densities", "must be >= 0");
  const std::string N_rule = get_string(p, "N");

  struct Job {
    int L, N;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (int L : c.sizes) {
    const auto geom = make_geometry(c.d, L, Boundary::kPeriodic);
    for (int N : particle_numbers(N_rule, geom.site_count()))
      for (int r = 0; r < c.seeds; ++r) jobs.push_back({L, N, c.seed + static_cast<std::uint64_t>(r)});
  }
  struct Out {
    std::vector<Row> rows;
    double mean = 0.0;
  };
  const auto outs = parallel_map(jobs.size(), threads_of(config), [&](std::size_t i) {
    const Job& j = jobs[i];
    const auto geom = make_geometry(c.d, j.L, Boundary::kPeriodic);
    const auto field = make_field(geom, c.K, j.seed);
    const CanonicalMeasure mu(field, j.N);
    Out o;
    const auto est = two_block_statistic(geom, mu, params, static_cast<std::size_t>(samples),
                                         derive_seed(j.seed, kSampling, c.d, j.L));
    o.mean = est.mean;
    o.rows.push_back({c.d, j.L, j.N, c.K, j.seed, "two_block", est.mean, "exact sampling", est.standard_error});
    if (densities > 0 && states_of(geom.site_count(), j.N) <= 20000) {
      const auto base = make_measured_space(mu);
      const std::size_t dim = base->space.dimension();
      std::vector<double> f(dim, 1.0);
      o.rows.push_back({c.d, j.L, j.N, c.K, j.seed, "functional_uniform", two_block_functional(geom, mu, f, params),
                        "enumeration", std::nullopt});
      std::mt19937_64 rng(derive_seed(j.seed, kDensity, c.d, j.L));
      std::normal_distribution<double> gauss;
      double best = -1e300;
      for (std::int64_t t = 0; t < densities; ++t) {
        double mass = 0.0;
        for (std::size_t s = 0; s < dim; ++s) {
          f[s] = std::exp(gauss(rng));
          mass += base->probabilities[s] * f[s];
        }
        for (double& v : f) v /= mass;
        best = std::max(best, two_block_functional(geom, mu, f, params));
      }
      o.rows.push_back({c.d, j.L, j.N, c.K, j.seed, "functional_max_random", best, "enumeration", std::nullopt});
    }
    return o;
  });
  Report report;
  std::map<int, std::vector<double>> per_size;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    report.rows.insert(report.rows.end(), outs[i].rows.begin(), outs[i].rows.end());
    per_size[jobs[i].L].push_back(outs[i].mean);
  }
  report.pass = decreasing_trend(report, per_size, c.K, "two_block");
  report.messages.push_back(std::string("two-block trend: ") + (report.pass ? "PASS" : "FAIL"));
  return report;
}

Report run_congestion(const json& config) {
  const json& p = config["params"];
  const int d = static_cast<int>(get_int(p, "d"));
  if (d < 1 || d > 3) throw UsageError("--d", "must be 1, 2 or 3");
  const auto sizes = parse_int_list("--L", get_string(p, "L"));
  for (int L : sizes)
    if (L < 1) throw UsageError("--L", "sizes must be >= 1, got " + std::to_string(L));
  const Boundary bc = read_boundary(get_string(p, "boundary"), Boundary::kFree);
  const bool per_bond = get_bool(p, "per-bond");
  const auto reports = parallel_map(sizes.size(), threads_of(config), [&](std::size_t i) {
    const auto geom = make_geometry(d, sizes[i], bc);
    if (geom.site_count() > 20000) throw UsageError("--L", "congestion counting limited to 20000 sites");
    return congestion(geom);
  });
  Report report;
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const int L = sizes[i];
    const auto& r = reports[i];
    const Row key{d, L, std::nullopt, std::nullopt, std::nullopt, "", 0.0, "exact", std::nullopt};
    auto add = [&](const std::string& q, double v, const std::string& m) {
      Row row = key;
      row.quantity = q;
      row.value = v;
      row.method = m;
      report.rows.push_back(row);
    };
    add("max_congestion", static_cast<double>(r.max_usage), "unordered pairs");
    add("max_congestion_ordered", static_cast<double>(r.max_usage * r.ordered_pair_factor), "ordered pairs");
    add("nominal", r.nominal, "d(L/2)^(d+1)");
    add("max_path_length", static_cast<double>(r.max_path_length), "bonds");
    if (per_bond) {
      const auto geom = make_geometry(d, L, bc);
      for (std::size_t b = 0; b < r.usage.size(); ++b)
        add("usage:" + std::to_string(geom.bonds()[b].a) + "-" + std::to_string(geom.bonds()[b].b),
            static_cast<double>(r.usage[b]), "unordered pairs");
    }
    if (d == 1 && bc == Boundary::kFree) {
      std::int64_t expected = 0;
      for (int x = 0; x + 1 < L; ++x) expected = std::max<std::int64_t>(expected, std::int64_t{x + 1} * (L - x - 1));
      bool ok = r.max_usage == expected;
      if (L % 2 == 0) ok = ok && static_cast<double>(r.max_usage) == r.nominal;
      mismatches += !ok;
    }
  }
  report.pass = mismatches == 0;
  report.summary = {{"sizes", sizes.size()}, {"mismatches", mismatches}, {"ordered_pair_factor", 2}};
  report.messages.push_back("congestion over " + std::to_string(sizes.size()) + " sizes" +
                            (d == 1 && bc == Boundary::kFree ? ", 1-d formula mismatches: " + std::to_string(mismatches)
                                                             : std::string(" (reported only)")) +
                            ": " + (report.pass ? "PASS" : "FAIL"));
  return report;
}

}  // namespace dlg::cli
