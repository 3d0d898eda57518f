#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hamel/boundary.hpp"
#include "hamel/solver.hpp"

namespace hamel::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitFailed = 2;

inline constexpr std::uint64_t kDefaultSeed = 20240601;

struct VerifyOptions {
  std::uint64_t seed = kDefaultSeed;
  bool quick = false;
  bool probe_q1 = false;
  int probe_samples = 10000;
  int hardy_profiles = 1000;
  int poincare_streams = 200;
  int qform_streams = 500;
};

/// Parsed run configuration. Flow values stay optional until resolved
/// against the boundary data and the command-line overrides.
struct RunConfig {
  std::optional<double> flux;
  std::optional<double> mu0;
  std::optional<double> mu;
  /// Boundary data: spectrum relative to (flux, mu0), or raw samples.
  std::optional<BoundarySpectrum> modes;
  std::optional<BoundaryTrace> samples;
  SolverConfig solver;
  std::vector<double> mu_list;
  VerifyOptions verify;
  std::filesystem::path out_dir = "out";
  int theta_points = 0;
  int trace_samples = 0;
};

/// Validates against the documented schema; unknown keys and wrong types
/// throw InvalidInput naming the offending path. Relative boundary file
/// paths resolve against base_dir.
RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

/// Flow constants and raw trace after applying boundary data and overrides.
struct ResolvedRun {
  double flux = 0.0;
  double mu0 = 0.0;
  double mu = 0.0;
  BoundaryTrace trace;
};
ResolvedRun resolve(const RunConfig& cfg);

/// JSON text with every number printed to 17 significant digits, keys in
/// sorted order, two-space indentation.
std::string dump_json(const nlohmann::json& j);
/// Number formatting shared by the CSV writers.
std::string format_number(double v);

/// Entry point of the command-line tool; returns the process exit code.
int run(int argc, char** argv);

}  // namespace hamel::cli
