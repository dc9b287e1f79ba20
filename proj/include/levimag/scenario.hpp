#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace levimag {

inline constexpr const char* kScenarioSchema = "levimag-scenario/1";
inline constexpr const char* kOutputDirEnv = "LEVIMAG_OUTPUT_DIR";

/// Malformed or schema-violating scenario; the message starts with file:line:column.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation failed after the scenario was accepted; names the operation.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioInfo {
  std::string name;
  std::string figure;
  std::string kind;  // design | map | simulate-classical | analyze | simulate-quantum
  std::string mode;
  std::uint64_t seed = 0;
};

/// Parses and type-checks every parameter without running anything.
ScenarioInfo validate_scenario(const std::filesystem::path& file);

struct RunOptions {
  std::optional<std::uint64_t> seed;      // overrides the scenario seed
  std::filesystem::path output_root;      // outputs go to output_root/<name>
};

struct RunResult {
  ScenarioInfo info;
  std::filesystem::path output_dir;
  std::vector<std::string> files;  // relative to output_dir, in write order
  nlohmann::json results;
  double wall_seconds = 0.0;
};

/// Runs the scenario and writes CSV tables, results.json, manifest.json and
/// timing.json. Everything except timing.json is byte-identical for identical
/// inputs and seed.
RunResult run_scenario(const std::filesystem::path& file, const RunOptions& options);

struct CatalogEntry {
  std::string name;
  std::string figure;
  std::string description;
};

/// Bundled reproduction scenarios in a fixed order.
const std::vector<CatalogEntry>& scenario_catalog();

/// Directory holding the bundled scenario files.
std::filesystem::path bundled_scenario_dir();

/// `name_or_path` as given if it names a file, else the bundled scenario of that name.
std::filesystem::path resolve_scenario(const std::string& name_or_path);

/// Default output root: $LEVIMAG_OUTPUT_DIR, else ./levimag-output.
std::filesystem::path default_output_root();

}  // namespace levimag
