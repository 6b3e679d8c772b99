#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "znnqp/app/config.hpp"
#include "znnqp/integrator.hpp"
#include "znnqp/robot.hpp"

namespace znnqp::app {

enum ExitCode : int {
  kExitOk = 0,
  kExitMismatch = 1,
  kExitConfig = 2,
  kExitNumerical = 3,
  kExitInfeasible = 4,
};

struct CommandOptions {
  /// Replaces the config's output_dir.
  std::optional<std::filesystem::path> out_dir;
};

int cmd_bench(const std::filesystem::path& config, const CommandOptions& opts, std::ostream& msg);
int cmd_track(const std::filesystem::path& config, const CommandOptions& opts, std::ostream& msg);
int cmd_oracle(const std::filesystem::path& config, const CommandOptions& opts, std::ostream& msg);
/// Recomputes every summary in the output directory from the per-run CSVs.
int cmd_verify(const std::filesystem::path& config, const CommandOptions& opts, std::ostream& msg);

struct BenchRow {
  ModelSpec spec;
  std::string noise;
  std::uint64_t seed = 0;
  double res_at_tc = 0.0;
  double res_steady_max = 0.0;
  double runtime_ms = 0.0;
  std::string status;  ///< "ok" or "blowup"
  std::string csv;     ///< per-run file name inside the output directory
  RunLog log;
};

/// Initial KKT vector: oracle point at t plus a perturbation of exactly
/// `radius` in a seeded direction.
Vec initial_state(const TimeVariantQP& problem, double t, double radius, std::uint64_t seed);

/// Runs every model x alpha x noise x seed of a bench experiment. When `out`
/// is set, per-run CSVs and summary.csv are written there.
std::vector<BenchRow> run_bench(const Experiment& ex, const std::optional<std::filesystem::path>& out,
                                std::ostream& msg);

struct TrackRow {
  ModelSpec spec;
  std::string noise;
  std::uint64_t seed = 0;
  TrackSummary summary;
  double runtime_ms = 0.0;
  std::string status;
  std::string csv;
  TrackLog log;
};

std::vector<TrackRow> run_track(const Experiment& ex, const std::optional<std::filesystem::path>& out,
                                std::ostream& msg);

inline constexpr const char* kBenchSummary = "summary.csv";
inline constexpr const char* kTrackSummary = "track_summary.csv";
inline constexpr const char* kOracleCsv = "oracle.csv";

}  // namespace znnqp::app
