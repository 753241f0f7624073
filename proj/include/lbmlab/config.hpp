#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lbmlab/model.hpp"

namespace lbmlab {

// Settings of one CLI run. Values are kept as text; typed accessors parse on demand and
// record every default they hand out, so the manifest lists the effective configuration.
struct RunConfig {
  std::string subcommand;
  std::map<std::string, std::string> values;

  // Throws ConfigError for an unknown key.
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values.count(key) > 0; }

  std::string text(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key, double fallback) const;
  std::optional<double> number(const std::string& key) const;
  int integer(const std::string& key, int fallback) const;
  std::vector<double> list(const std::string& key) const;

  // Model parameters (alpha, beta, ...; vx, vy, vz for AD models) and rates (s4 / sigma4).
  ParamMap model_params() const;
  ParamMap model_rates() const;
  std::array<double, 3> velocity() const;

  // Effective settings: explicit values plus the defaults consulted so far.
  std::map<std::string, std::string> effective() const;

 private:
  mutable std::map<std::string, std::string> defaults_;
};

bool known_config_key(const std::string& key);
// Documented keys, without the s<N> / sigma<N> rate pattern.
const std::vector<std::string>& config_keys();

// key = value lines; '#' starts a comment; blank lines ignored. A "subcommand" line sets
// cfg.subcommand, so a manifest loads back as a config file.
void load_config(RunConfig& cfg, std::istream& is, const std::string& source = "config");
void load_config_file(RunConfig& cfg, const std::string& path);

std::string format_number(double v);  // 17 significant digits

// Comment lines with the code version and output files, "subcommand = ...", then every effective setting.
void write_manifest(std::ostream& os, const RunConfig& cfg, const std::vector<std::string>& outputs);

const char* code_version();

}  // namespace lbmlab
