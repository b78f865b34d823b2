#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "nlt/io.hpp"

namespace nlt {

enum class ExperimentKind { kTVMonotonicity, kCounterexample, kRateStudy, kEntropyCheck, kSingleRun };

std::string to_string(ExperimentKind k);

struct CatalogEntry {
  ExperimentKind kind;
  std::string name;
  std::string anchor;  // the claim the experiment probes
  std::string summary;
  std::vector<std::string> required;
  json defaults;
};

const std::vector<CatalogEntry>& experiment_catalog();
json catalog_to_json();
void print_catalog(std::ostream& os);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kSingleRun;
  json normalized;  // the full config with defaults filled in
  std::filesystem::path base_dir;  // for relative table paths
};

/// Validates against the schema and fills defaults. Accepts a manifest
/// written by a previous run (its "config" member is used). Throws
/// ConfigError with a descriptive message.
ExperimentConfig parse_config(const json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Deterministic label derived from the normalized config.
std::string default_label(const ExperimentConfig& cfg);

struct Verdict {
  std::string name;
  bool pass = false;
  bool expected_pass = true;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;

  bool as_expected() const { return pass == expected_pass; }
};

struct ExperimentResult {
  std::filesystem::path dir;
  std::vector<Verdict> verdicts;
  bool all_as_expected() const;
};

struct RunOptions {
  std::string label;  // empty: default_label
  int jobs = 1;
  std::ostream* log = nullptr;
};

/// Runs the experiment and writes out/<experiment>/<label>/{manifest.json,
/// verdicts.json, series/*.csv, snapshots/*.csv}.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts);

}  // namespace nlt
