#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <vector>

#include "znnqp/errors.hpp"
#include "znnqp/models.hpp"
#include "znnqp/noise.hpp"
#include "znnqp/tvqp.hpp"

namespace znnqp {

struct Diagnostics {
  bool lyapunov = false;
  bool condition_number = false;
};

struct RunConfig {
  double dt = 1e-3;
  double t_end = 3.0;
  ModelSpec model;
  NoiseChannel noise = NoiseChannel::zero(1);
  KktState y0;
  std::size_t record_every = 1;
  Diagnostics diagnostics;

  /// Throws DomainError / DimensionMismatch on invalid settings.
  void validate(const QpDims& dims) const;
  double t_start() const noexcept { return dt; }
  std::uint64_t steps() const;
};

struct RunLog {
  double dt = 0.0;
  std::vector<double> times;
  std::vector<double> residual_norms;
  std::vector<Vec> states;
  /// Aligned with times when requested; NaN inside [t_c - 10 dt, t_c).
  std::vector<double> lyapunov_values;
  /// 2-norm condition number of M(t), ZNN-family models only.
  std::vector<double> condition_numbers;
  std::vector<std::uint64_t> degenerate_steps;

  std::size_t size() const noexcept { return times.size(); }
  bool empty() const noexcept { return times.empty(); }
  /// Residual norm of the sample nearest to t.
  double residual_at(double t) const;
  /// Largest residual norm over samples with t_from <= t <= t_to (NaN if none).
  double max_residual(double t_from, double t_to) const;

  /// Columns t, res_norm, y_0..y_{k-1}, plus V when Lyapunov values were recorded.
  void write_csv(std::ostream& out) const;
  void write_csv(const std::filesystem::path& path) const;
};

class NumericalBlowup : public Error {
 public:
  NumericalBlowup(const std::string& what, double t, RunLog partial)
      : Error(what), t_(t), partial_(std::move(partial)) {}
  double time() const noexcept { return t_; }
  const RunLog& partial_log() const noexcept { return partial_; }

 private:
  double t_;
  RunLog partial_;
};

inline constexpr double kBlowupThreshold = 1e12;

/// One forward-Euler step of a model, keeping FO-GNN's previous state.
class Stepper {
 public:
  Stepper(ModelSpec model, double dt);

  struct Outcome {
    Vec eps;
    double res_norm = 0.0;
    bool degenerate = false;
  };

  /// Residual at (y, t) for the given problem sample.
  Outcome evaluate(const QpSample& sample, const Vec& y, double t, double tau = 1e-8) const;

  /// y <- y + dt * ydot(y, t, delta). Returns the residual at the pre-step state.
  Outcome advance(const QpSample& sample, Vec& y, double t, const Vec& delta,
                  double tau = 1e-8);

  /// Also hands back the blocks so callers can inspect M(t).
  Outcome advance(const QpSample& sample, Vec& y, double t, const Vec& delta, double tau,
                  KktBlocks* blocks_out);

  const ModelSpec& model() const noexcept { return model_; }
  double dt() const noexcept { return dt_; }

 private:
  ModelSpec model_;
  double dt_;
  Vec y_prev_;
};

/// Forward-Euler integration from t_start = dt to t_end. The residual is logged
/// every record_every steps and at the final step.
RunLog integrate(const TimeVariantQP& problem, const RunConfig& cfg);

struct LyapunovSeries {
  std::vector<double> times;
  std::vector<double> values;
};

/// V = ||eps|| / (t_c - t) for t < t_c - 10 dt and ||eps|| / (t - t_p) for t >= t_c.
/// Samples in between are omitted.
LyapunovSeries lyapunov_series(const RunLog& log, double t_c, double t_p);

}  // namespace znnqp
