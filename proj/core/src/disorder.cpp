#include "dlg/disorder.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace dlg {

namespace {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& token) {
  double v = 0.0;
  auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size())
    throw std::invalid_argument("malformed number in field file: '" + token + "'");
  return v;
}

}  // namespace

DisorderField::DisorderField(std::vector<double> values, double bound)
    : values_(std::move(values)), bound_(bound) {
  if (!(bound_ >= 0.0) || !std::isfinite(bound_)) throw std::invalid_argument("field bound K must be >= 0");
  for (std::size_t x = 0; x < values_.size(); ++x) {
    if (!(std::abs(values_[x]) <= bound_))
      throw std::invalid_argument("field value at site " + std::to_string(x) + " exceeds bound K");
  }
}

DisorderField DisorderField::shifted(double c) const {
  std::vector<double> v(values_);
  for (double& a : v) a += c;
  return DisorderField(std::move(v), bound_ + std::abs(c));
}

DisorderField generate_iid(const LatticeGeometry& geom, double K, std::uint64_t seed) {
  if (!(K >= 0.0)) throw std::invalid_argument("K must be >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> v(geom.site_count());
  for (double& a : v) a = std::clamp(-K + 2.0 * K * unit(rng), -K, K);
  return DisorderField(std::move(v), K);
}

QuantizedField quantize_to_grid(const DisorderField& field, int L) {
  if (L < 1) throw std::invalid_argument("grid resolution L must be >= 1");
  const double K = field.bound();
  if (K == 0.0) return {DisorderField::zero(field.size()), true};
  std::vector<double> v(field.size());
  for (std::size_t x = 0; x < v.size(); ++x) {
    auto j = static_cast<long>(std::floor(field[x] * L / K + 0.5));
    j = std::clamp<long>(j, -L, L);
    // j / L first so that j = +-L lands exactly on +-K.
    v[x] = K * (static_cast<double>(j) / L);
  }
  return {DisorderField(std::move(v), K), false};
}

DisorderField force_endpoints(const DisorderField& field) {
  if (field.size() == 0) throw std::invalid_argument("empty field");
  std::vector<double> v(field.values().begin(), field.values().end());
  v.front() = field.bound();
  v.back() = field.bound();
  return DisorderField(std::move(v), field.bound());
}

std::vector<Site> peak_set(const DisorderField& field) {
  if (field.size() == 0) throw std::invalid_argument("empty field");
  const double K = field.bound();
  if (field[0] != K || field[field.size() - 1] != K)
    throw std::invalid_argument("peak_set requires both endpoints at K; apply force_endpoints first");
  std::vector<Site> peaks;
  for (std::size_t x = 0; x < field.size(); ++x)
    if (field[x] == K) peaks.push_back(static_cast<Site>(x));
  return peaks;
}

void write_field(std::ostream& out, const DisorderField& field) {
  out << "# K " << format_double(field.bound()) << '\n';
  for (std::size_t x = 0; x < field.size(); ++x) out << x << ' ' << format_double(field[x]) << '\n';
}

DisorderField read_field(std::istream& in) {
  std::vector<double> values;
  double bound = -1.0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line[0] == '#') {
      std::string hash, key, value;
      ls >> hash >> key >> value;
      if (key == "K") bound = parse_double(value);
      continue;
    }
    std::string site_token, value_token;
    if (!(ls >> site_token >> value_token)) throw std::invalid_argument("malformed field line: '" + line + "'");
    const auto site = static_cast<std::size_t>(std::stoul(site_token));
    if (site != values.size()) throw std::invalid_argument("field file sites must be listed in order from 0");
    values.push_back(parse_double(value_token));
  }
  if (bound < 0.0) {
    bound = 0.0;
    for (double a : values) bound = std::max(bound, std::abs(a));
  }
  return DisorderField(std::move(values), bound);
}

}  // namespace dlg
