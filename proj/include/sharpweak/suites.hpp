#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sharpweak/mc_sim.hpp"

namespace sharpweak {

// One checked statement. Every sample contributes a margin, the signed slack
// of the exact statement (an equality contributes -|error|); the sample is a
// violation when its margin is below -tolerance.
struct Property {
  std::string name;
  long samples = 0;
  long violations = 0;
  double worst_margin = 0.0;
  double tolerance = 0.0;
  std::string note;

  Property() = default;
  Property(std::string name_, double tolerance_);

  void record(double margin);
  // Counts a sample that could not be evaluated as a violation.
  void record_failure(const std::string& why);
  bool passed() const { return samples > 0 && violations == 0; }
};

struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::uint64_t seed = 0;
  std::string artifact_version;
  std::string timestamp;
};

// Timestamp is UTC ISO 8601, taken from SOURCE_DATE_EPOCH when set so that
// manifests can be made byte-identical.
RunManifest make_manifest(std::string command, std::vector<std::pair<std::string, std::string>> parameters,
                          std::uint64_t seed);
std::string artifact_version();

struct SuiteReport {
  std::string suite;
  double p = 0.0;
  std::uint64_t seed = 0;
  std::vector<Property> properties;
  std::vector<StatCheck> statistics;
  double seconds = 0.0;

  // All properties hold and no statistic is a Fail (warnings are allowed).
  bool passed() const;
};

struct SuiteOptions {
  std::optional<double> p;
  std::uint64_t seed = 42;
  std::optional<long> n;  // per-suite sample count; each suite has a default
  double dt = 1e-2;
  int workers = 1;
};

const std::vector<std::string>& suite_names();

// Runs a named suite. Throws std::invalid_argument for an unknown name and
// ParameterError when p is outside the suite's range.
SuiteReport run_suite(const std::string& name, const SuiteOptions& opts);

void to_json(nlohmann::json& j, const Property& prop);
void to_json(nlohmann::json& j, const StatCheck& check);
void to_json(nlohmann::json& j, const RunManifest& m);
void to_json(nlohmann::json& j, const SuiteReport& r);

}  // namespace sharpweak
