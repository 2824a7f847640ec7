#pragma once

#include "fracgl/params.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fracgl {

// Unset fields fall back to the experiment's defaults.
struct ExperimentConfig {
  std::string experiment;
  std::optional<int> n;
  std::optional<double> gamma;
  std::optional<double> phi_l;
  std::optional<double> phi_r;
  std::optional<double> T;
  std::optional<double> dt;
  std::optional<long> replicas;
  std::uint64_t seed = 20240611;
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct CheckResult {
  int criterion = 0;
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string relation;  // how value is compared with threshold, e.g. "<="
};

struct Artifact {
  std::string file_name;
  std::string contents;
};

// Numeric table echoed into summary.json.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct ExperimentOutput {
  std::string experiment;
  std::uint64_t seed = 0;
  std::map<std::string, double> inputs;
  std::map<std::string, double> metrics;
  std::map<std::string, std::string> notes;
  std::map<std::string, Table> tables;
  std::vector<CheckResult> checks;
  std::vector<Artifact> artifacts;

  bool passed() const;
  // every check attached to the criterion passed; empty when the experiment does not cover it
  std::optional<bool> criterion_passed(int criterion) const;
};

struct ExperimentInfo {
  std::string name;
  std::vector<int> criteria;
  std::string description;
};

const std::vector<ExperimentInfo>& experiment_catalog();

// Throws DomainError for unknown experiments or invalid parameters.
ExperimentOutput run_experiment(const ExperimentConfig& config);

// summary.json: echoed inputs, metrics, notes and every check with its threshold
std::string summary_json(const ExperimentOutput& output);

// Writes summary.json and the artifacts into an existing writable directory.
void write_experiment_outputs(const ExperimentOutput& output, const std::string& directory);

}  // namespace fracgl
