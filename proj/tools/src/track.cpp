#include <chrono>
#include <fstream>
#include <ostream>

#include <fmt/format.h>

#include "common.hpp"
#include "znnqp/csv.hpp"
#include "znnqp/errors.hpp"

namespace znnqp::app {

namespace {

const std::vector<std::string> kHeader{
    "model",      "trajectory", "noise",           "alpha",           "seed",
    "max_ex",     "max_ey",     "max_ez",          "mean_ex",         "mean_ey",
    "mean_ez",    "violations", "angle_violations", "velocity_violations", "return_gap",
    "max_qd",     "runtime_ms", "status",          "csv"};

}  // namespace

std::vector<TrackRow> run_track(const Experiment& ex, const std::optional<std::filesystem::path>& out,
                                std::ostream& msg) {
  if (ex.problem != ProblemKind::Robot) throw ConfigError("problem: track needs 'robot'");
  if (ex.models.empty()) throw ConfigError("models: list is empty");
  const ArmModel arm = ArmModel::load(ex.arm_file);
  const Eigen::Index k = arm.dof() + 3 + 2 * arm.dof();
  if (out) detail::ensure_dir(*out);

  std::vector<TrackRow> rows;
  for (const auto& entry : ex.models) {
    for (double alpha : entry.alphas) {
      for (const auto& sc : ex.noises) {
        for (std::uint64_t seed : ex.seeds) {
          TrackRow row;
          row.spec = entry.spec(alpha, sc.channel.inf_bound());
          row.noise = sc.name;
          row.seed = seed;
          row.csv = fmt::format("track-{}-{}-{}-s{}.csv", to_string(ex.trajectory.kind),
                                detail::model_file_stem(row.spec), slug(sc.name), seed);
          const auto t0 = std::chrono::steady_clock::now();
          try {
            row.log = track(arm, ex.trajectory, row.spec, sc.channel.resized(k).reseeded(seed), ex.dt);
            row.status = "ok";
          } catch (const NumericalBlowup& e) {
            row.status = "blowup";
            msg << "warning: " << e.what() << '\n';
          }
          row.runtime_ms =
              std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
          row.summary = summarize(arm, row.log);
          if (out) row.log.write_csv(*out / row.csv);
          rows.push_back(std::move(row));
        }
      }
    }
  }

  if (out) {
    std::ofstream f(*out / kTrackSummary, std::ios::binary);
    if (!f) throw Error("cannot write " + (*out / kTrackSummary).string());
    CsvWriter w(f, kHeader);
    for (const auto& r : rows) {
      const auto& s = r.summary;
      w.row(std::vector<std::string>{
          std::string(to_string(r.spec.kind)), std::string(to_string(ex.trajectory.kind)), r.noise,
          detail::alpha_cell(r.spec), std::to_string(r.seed), format_real(s.max_error.x()),
          format_real(s.max_error.y()), format_real(s.max_error.z()), format_real(s.mean_error.x()),
          format_real(s.mean_error.y()), format_real(s.mean_error.z()), std::to_string(s.violations()),
          std::to_string(s.angle_violations), std::to_string(s.velocity_violations),
          format_real(s.return_gap), format_real(s.max_joint_speed), fmt::format("{:.3f}", r.runtime_ms),
          r.status, r.csv});
    }
  }
  return rows;
}

int cmd_track(const std::filesystem::path& config, const CommandOptions& opts, std::ostream& msg) {
  return detail::guarded(config, opts, msg, [&](const Experiment& ex, const std::filesystem::path& dir) {
    const auto rows = run_track(ex, dir, msg);
    bool blowup = false;
    for (const auto& r : rows) {
      const auto& s = r.summary;
      msg << fmt::format("{:<22} {:<10} max err = ({:.2e}, {:.2e}, {:.2e}) m  violations = {}  gap = {:.2e} rad  {:.0f} ms  {}\n",
                         r.spec.label(), to_string(ex.trajectory.kind), s.max_error.x(), s.max_error.y(),
                         s.max_error.z(), s.violations(), s.return_gap, r.runtime_ms, r.status);
      blowup = blowup || r.status != "ok";
    }
    msg << "wrote " << (dir / kTrackSummary).string() << '\n';
    return blowup ? kExitNumerical : kExitOk;
  });
}

}  // namespace znnqp::app
