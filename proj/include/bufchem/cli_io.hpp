#pragma once

// Run configuration (INI text: top-level `seed` plus flat sections) and the
// command dispatcher behind the bufchem tool.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bufchem/buffered_core.hpp"
#include "bufchem/kinetics.hpp"
#include "bufchem/simulate.hpp"
#include "bufchem/single_chemostat.hpp"

namespace bufchem {

struct BufferedSpec {
  std::optional<double> alpha, r;
  std::optional<PhysicalSplit> physical;
};

struct SweepSpec {
  double alpha_min;
  double alpha_max;
  int points = 400;
  bool log_spaced = true;
};

struct DesignSpec {
  double S_in_max = 3.0;
  int points = 30;
  std::optional<double> v2;  // query for the admissible D2 interval
};

struct SimulateSpec {
  std::vector<double> initial;  // (S, X) or (S1, X1, S2, X2), biomass in yield units
  double eps = 1e-6;
};

struct AuditSpec {
  std::string topology;  // serial | parallel
  std::vector<double> volume_fractions;
  std::vector<double> flow_fractions;
};

struct RunConfig {
  std::uint64_t seed = 0;
  GrowthModel model;
  double yield = 1.0;
  double S_in = 0.0;
  std::optional<double> D = std::nullopt;
  std::optional<BufferedSpec> buffered = std::nullopt;
  std::optional<IntegratorSettings> integrator = std::nullopt;
  std::optional<SweepSpec> sweep = std::nullopt;
  std::optional<DesignSpec> design = std::nullopt;
  std::optional<SimulateSpec> simulate = std::nullopt;
  std::optional<AuditSpec> audit = std::nullopt;
};

/// Strict parse: unknown sections or keys, duplicates, malformed numbers and
/// invariant violations throw Config errors naming the offending key.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text);

/// Dilution rate of the single tank (D, Q/V, or derived from the physical
/// buffered split). Throws Config when none is available.
double dilution(const RunConfig& cfg);
SingleParams single_params(const RunConfig& cfg);
BufferedConfig buffered_config(const RunConfig& cfg);

struct OutputOptions {
  std::optional<std::filesystem::path> out_dir;  // stdout when absent
  std::optional<std::string> format;             // csv | json
};

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"kinetics",  "classify", "equilibria", "domain",
                                              "design",    "simulate", "audit"};
  return names;
}

/// Runs one command and writes its artifacts. Returns the process exit code;
/// on failure a JSON error object goes to `err` (1 for model errors, 2 for
/// configuration errors).
int dispatch(const std::string& command, const RunConfig& cfg, const OutputOptions& opts,
             std::ostream& out, std::ostream& err);

/// parse_config + dispatch with the same error reporting.
int run_command(const std::string& command, const std::filesystem::path& config_path,
                const OutputOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace bufchem
