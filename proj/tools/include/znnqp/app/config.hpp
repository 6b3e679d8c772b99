#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "znnqp/models.hpp"
#include "znnqp/noise.hpp"
#include "znnqp/robot.hpp"
#include "znnqp/tvqp.hpp"

namespace znnqp::app {

enum class ProblemKind { Builtin, Static, Robot };

struct ModelEntry {
  ModelKind kind = ModelKind::SPTC_AN_FOZNN;
  std::vector<double> alphas{0.5};
  /// Explicit parameter values, applied on top of the preset for the noise bound.
  std::map<std::string, double> overrides;
  std::optional<bool> euler_gain_cap;

  ModelSpec spec(double alpha, double noise_bound) const;
};

struct NoiseScenario {
  std::string name;
  NoiseChannel channel = NoiseChannel::zero(1);  ///< resized to the problem when run
};

struct TimeGrid {
  double start = 0.0;
  double stop = 3.0;
  double step = 0.01;

  std::vector<double> points() const;
};

/// One config file. Relative paths inside it resolve against its directory,
/// except output_dir which is relative to the working directory.
struct Experiment {
  int schema = 1;
  std::string name;
  ProblemKind problem = ProblemKind::Builtin;
  std::optional<QpData> static_qp;
  std::filesystem::path arm_file;
  TrajectorySpec trajectory;
  std::vector<ModelEntry> models;
  std::vector<NoiseScenario> noises;
  double dt = 1e-3;
  double t_end = 3.0;
  std::size_t record_every = 1;
  std::vector<std::uint64_t> seeds{1};
  double init_radius = 0.0;
  bool lyapunov = false;
  TimeGrid grid;
  std::filesystem::path output_dir;
};

/// Throws ConfigError naming the offending field.
Experiment load_experiment(const std::filesystem::path& path);
Experiment parse_experiment(const std::string& yaml_text, const std::filesystem::path& base_dir,
                            const std::string& origin = "<string>");

/// Time-variant QP of a builtin or static experiment.
TimeVariantQP build_problem(const Experiment& ex);

/// Filesystem-safe token for file names.
std::string slug(const std::string& s);

}  // namespace znnqp::app
