#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "growthbound/harness.hpp"

namespace growthbound {

/// ConfigError carrying the JSON pointer of the offending field.
class ConfigFieldError : public ConfigError {
 public:
  ConfigFieldError(std::string pointer, const std::string& message)
      : ConfigError(pointer + ": " + message), pointer_(std::move(pointer)) {}
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

inline constexpr int kSchemaVersion = 1;

struct PerronCommand {
  std::string obstacle_csv;       // empty: the scenario obstacle
  bool free_near_B = false;
  bool oracle = true;             // rerun with the Jacobi schedule and compare
  double oracle_tol = 1e-12;      // relative to max |F|
};

struct AdmissibilityCommand {
  std::string set = "A";  // A, B or S (A u B)
  double p_star = 1.0;
  ProbeSchedule schedule;
  bool default_schedule = true;
  std::vector<std::pair<double, double>> scale_pairs;  // (R, r); empty: no Assouad estimate
  int assouad_centers = 32;
};

struct ImproveCommand {
  int points = 200;  // d grid per CSV
  double exponent_t_lo = 1e-4, exponent_t_hi = 1e-2;
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> grid;
  std::optional<double> tol;
};

struct Config {
  std::string path;
  Scenario scenario;
  PerronCommand perron;
  AdmissibilityCommand admissibility;
  ImproveCommand improve;
  int compare_points = 40;
  std::string resolved_json;  // the whole document with defaults filled in
};

/// Parses and validates a scenario document. Overrides replace the seed, grid
/// size and tolerance before the resolved document is produced.
Config parse_config(const std::string& text, const Overrides& ov = {}, const std::string& origin = "<string>");
Config load_config(const std::string& path, const Overrides& ov = {});

/// Scenario files behind a path: a directory (sorted *.json except index.json), an index document
/// {"schema_version": 1, "scenarios": [paths relative to it]}, or one scenario file.
std::vector<std::string> expand_config_paths(const std::string& path);

}  // namespace growthbound
