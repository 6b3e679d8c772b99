#include "znnqp/integrator.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include <fmt/format.h>

#include "znnqp/csv.hpp"

namespace znnqp {

void RunConfig::validate(const QpDims& dims) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError(fmt::format("dt must be > 0, got {}", dt));
  if (!(t_end > dt)) throw DomainError(fmt::format("t_end = {} must exceed dt = {}", t_end, dt));
  if (record_every < 1) throw DomainError("record_every must be >= 1");
  model.validate();
  if (y0.dims != dims || y0.y.size() != dims.total()) {
    throw DimensionMismatch(fmt::format("initial state has length {}, problem needs {}",
                                        y0.y.size(), dims.total()));
  }
  if (noise.dim() != dims.total()) {
    throw DimensionMismatch(
        fmt::format("noise channel has dim {}, problem needs {}", noise.dim(), dims.total()));
  }
  if (!all_finite(y0.y)) throw DomainError("initial state is not finite");
}

std::uint64_t RunConfig::steps() const {
  return static_cast<std::uint64_t>(std::llround((t_end - t_start()) / dt));
}

double RunLog::residual_at(double t) const {
  if (empty()) return std::numeric_limits<double>::quiet_NaN();
  std::size_t best = 0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (std::abs(times[i] - t) < std::abs(times[best] - t)) best = i;
  }
  return residual_norms[best];
}

double RunLog::max_residual(double t_from, double t_to) const {
  double out = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_from || times[i] > t_to) continue;
    if (std::isnan(out) || residual_norms[i] > out) out = residual_norms[i];
  }
  return out;
}

void RunLog::write_csv(std::ostream& out) const {
  const Eigen::Index k = states.empty() ? 0 : states.front().size();
  const bool with_v = !lyapunov_values.empty();
  std::vector<std::string> header{"t", "res_norm"};
  for (Eigen::Index i = 0; i < k; ++i) header.push_back(fmt::format("y_{}", i));
  if (with_v) header.emplace_back("V");
  CsvWriter w(out, header);
  std::vector<double> row;
  for (std::size_t r = 0; r < times.size(); ++r) {
    row.clear();
    row.push_back(times[r]);
    row.push_back(residual_norms[r]);
    for (Eigen::Index i = 0; i < k; ++i) row.push_back(states[r][i]);
    if (with_v) row.push_back(lyapunov_values[r]);
    w.row(row);
  }
}

void RunLog::write_csv(const std::filesystem::path& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  write_csv(f);
  if (!f) throw Error("failed writing " + path.string());
}

Stepper::Stepper(ModelSpec model, double dt) : model_(std::move(model)), dt_(dt) {
  model_.validate();
  if (!(dt_ > 0.0)) throw DomainError("Stepper dt must be positive");
}

Stepper::Outcome Stepper::evaluate(const QpSample& sample, const Vec& y, double t,
                                   double tau) const {
  const KktState state(sample.value.dims(), y, t, tau);
  Outcome o;
  o.eps = residual(sample, state);
  o.res_norm = o.eps.norm();
  return o;
}

Stepper::Outcome Stepper::advance(const QpSample& sample, Vec& y, double t, const Vec& delta,
                                  double tau) {
  return advance(sample, y, t, delta, tau, nullptr);
}

Stepper::Outcome Stepper::advance(const QpSample& sample, Vec& y, double t, const Vec& delta,
                                  double tau, KktBlocks* blocks_out) {
  const KktState state(sample.value.dims(), y, t, tau);
  KktBlocks blocks = assemble_blocks(sample, state);
  Outcome o;
  o.eps = blocks.P * y + blocks.q;
  o.res_norm = o.eps.norm();

  if (y_prev_.size() != y.size()) y_prev_ = y;
  RhsContext ctx{dt_, &y_prev_};
  RhsResult r = rhs(model_, blocks, o.eps, y, t, delta, ctx);
  o.degenerate = r.degenerate || blocks.degenerate;

  y_prev_ = y;
  y += dt_ * r.ydot;
  if (blocks_out) *blocks_out = std::move(blocks);
  return o;
}

namespace {

double lyapunov_value(double res, double t, double t_c, double t_p, double dt) {
  if (t < t_c - 10.0 * dt) return res / (t_c - t);
  if (t >= t_c) return res / (t - t_p);
  return std::numeric_limits<double>::quiet_NaN();
}

double condition_number(const Mat& M) {
  Eigen::JacobiSVD<Mat> svd(M);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  const double lo = s[s.size() - 1];
  return lo > 0.0 ? s[0] / lo : std::numeric_limits<double>::infinity();
}

}  // namespace

RunLog integrate(const TimeVariantQP& problem, const RunConfig& cfg) {
  cfg.validate(problem.dims());
  const std::uint64_t steps = cfg.steps();
  const double t0 = cfg.t_start();
  const bool want_v = cfg.diagnostics.lyapunov;
  const double t_p = want_v ? t_p_of(cfg.model.zeta, cfg.model.Delta, cfg.model.t_c) : 0.0;
  const bool want_cond = cfg.diagnostics.condition_number && uses_kkt_solve(cfg.model.kind);

  RunLog log;
  log.dt = cfg.dt;
  const std::size_t expect = steps / cfg.record_every + 2;
  log.times.reserve(expect);
  log.residual_norms.reserve(expect);
  log.states.reserve(expect);

  Stepper stepper(cfg.model, cfg.dt);
  Vec y = cfg.y0.y;
  KktBlocks blocks;

  for (std::uint64_t k = 0;; ++k) {
    const double t = t0 + static_cast<double>(k) * cfg.dt;
    const QpSample sample = problem.sample(t);
    const bool record = (k % cfg.record_every == 0) || k == steps;

    if (k == steps) {
      const auto o = stepper.evaluate(sample, y, t, cfg.y0.tau);
      log.times.push_back(t);
      log.residual_norms.push_back(o.res_norm);
      log.states.push_back(y);
      if (want_v) log.lyapunov_values.push_back(lyapunov_value(o.res_norm, t, cfg.model.t_c, t_p, cfg.dt));
      if (want_cond) log.condition_numbers.push_back(condition_number(blocks.M));
      break;
    }

    const Vec state_before = y;
    const Vec delta = cfg.noise.sample(t, k);
    const auto o = stepper.advance(sample, y, t, delta, cfg.y0.tau, want_cond ? &blocks : nullptr);
    if (o.degenerate) log.degenerate_steps.push_back(k);
    if (record) {
      log.times.push_back(t);
      log.residual_norms.push_back(o.res_norm);
      log.states.push_back(state_before);
      if (want_v) log.lyapunov_values.push_back(lyapunov_value(o.res_norm, t, cfg.model.t_c, t_p, cfg.dt));
      if (want_cond) log.condition_numbers.push_back(condition_number(blocks.M));
    }

    const double ymax = y.size() ? y.cwiseAbs().maxCoeff() : 0.0;
    if (!(ymax <= kBlowupThreshold)) {
      throw NumericalBlowup(
          fmt::format("{} diverged at t = {} (|y|_inf = {})", cfg.model.label(), t + cfg.dt, ymax),
          t + cfg.dt, std::move(log));
    }
  }
  return log;
}

LyapunovSeries lyapunov_series(const RunLog& log, double t_c, double t_p) {
  LyapunovSeries out;
  for (std::size_t i = 0; i < log.size(); ++i) {
    const double v = lyapunov_value(log.residual_norms[i], log.times[i], t_c, t_p, log.dt);
    if (std::isnan(v)) continue;
    out.times.push_back(log.times[i]);
    out.values.push_back(v);
  }
  return out;
}

}  // namespace znnqp
