#include "lbmlab/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "lbmlab/errors.hpp"

#ifndef LBMLAB_VERSION
#define LBMLAB_VERSION "unknown"
#endif

namespace lbmlab {

namespace {

const std::vector<std::string> kKeys = {
    // general
    "model", "output", "jobs", "seed",
    // background / advection velocity
    "vx", "vy", "vz",
    // equilibrium parameters
    "alpha", "beta", "gamma", "c1", "q", "d1", "d2", "a",
    // dispersion and stability
    "angles", "theta", "k", "kgrid",
    // tune
    "objective", "route", "kappa", "nu", "vmax",
    // simulate
    "experiment", "nx", "ny", "nz", "steps", "r0", "g0", "chi", "dump_every", "center_x", "center_y", "wave_x",
    "wave_y", "init", "warmup",
    // toy
    "speed", "angle", "t"};

const std::vector<std::string> kModelParams = {"alpha", "beta", "gamma", "c1", "q", "d1", "d2", "a"};

bool rate_key(const std::string& key) {
  std::size_t pos = 0;
  if (key.rfind("sigma", 0) == 0) pos = 5;
  else if (key.rfind("s", 0) == 0) pos = 1;
  else return false;
  if (pos == key.size() || key.size() - pos > 2) return false;
  return std::all_of(key.begin() + pos, key.end(), [](unsigned char c) { return std::isdigit(c); });
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& text) {
  double v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw ConfigError("bad number for '" + key + "': '" + text + "'");
  return v;
}

}  // namespace

bool known_config_key(const std::string& key) {
  return rate_key(key) || std::find(kKeys.begin(), kKeys.end(), key) != kKeys.end();
}

const std::vector<std::string>& config_keys() { return kKeys; }

void RunConfig::set(const std::string& key, const std::string& value) {
  if (!known_config_key(key)) throw ConfigError("unknown config key '" + key + "'");
  values[key] = value;
}

std::string RunConfig::text(const std::string& key, const std::string& fallback) const {
  auto it = values.find(key);
  if (it != values.end()) return it->second;
  defaults_[key] = fallback;
  return fallback;
}

std::optional<double> RunConfig::number(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end()) return std::nullopt;
  return parse_number(key, it->second);
}

double RunConfig::number(const std::string& key, double fallback) const {
  if (auto v = number(key)) return *v;
  defaults_[key] = format_number(fallback);
  return fallback;
}

int RunConfig::integer(const std::string& key, int fallback) const {
  auto it = values.find(key);
  if (it == values.end()) {
    defaults_[key] = std::to_string(fallback);
    return fallback;
  }
  int v = 0;
  const std::string& t = it->second;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) throw ConfigError("bad integer for '" + key + "': '" + t + "'");
  return v;
}

std::vector<double> RunConfig::list(const std::string& key) const {
  std::vector<double> out;
  auto it = values.find(key);
  if (it == values.end()) return out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(key, trim(item)));
  return out;
}

ParamMap RunConfig::model_params() const {
  ParamMap p;
  for (const auto& k : kModelParams)
    if (auto v = number(k)) p[k] = *v;
  return p;
}

ParamMap RunConfig::model_rates() const {
  ParamMap r;
  for (const auto& [k, v] : values)
    if (rate_key(k)) r[k] = parse_number(k, v);
  return r;
}

std::array<double, 3> RunConfig::velocity() const {
  return {number("vx").value_or(0.0), number("vy").value_or(0.0), number("vz").value_or(0.0)};
}

std::map<std::string, std::string> RunConfig::effective() const {
  auto all = defaults_;
  for (const auto& [k, v] : values) all[k] = v;
  return all;
}

void load_config(RunConfig& cfg, std::istream& is, const std::string& source) {
  std::string line;
  int n = 0;
  while (std::getline(is, line)) {
    ++n;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(n) + ": expected key = value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key == "subcommand") {
      cfg.subcommand = value;
      continue;
    }
    if (!known_config_key(key)) throw ConfigError(source + ":" + std::to_string(n) + ": unknown config key '" + key + "'");
    cfg.values[key] = value;
  }
}

void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file '" + path + "'");
  load_config(cfg, is, path);
}

std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void write_manifest(std::ostream& os, const RunConfig& cfg, const std::vector<std::string>& outputs) {
  os << "# lbmlab " << code_version() << '\n';
  for (const auto& f : outputs) os << "# output " << f << '\n';
  os << "subcommand = " << cfg.subcommand << '\n';
  for (const auto& [k, v] : cfg.effective()) os << k << " = " << v << '\n';
}

const char* code_version() { return LBMLAB_VERSION; }

}  // namespace lbmlab
