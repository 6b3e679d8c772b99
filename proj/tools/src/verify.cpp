#include <filesystem>
#include <ostream>

#include <fmt/format.h>

#include "common.hpp"
#include "znnqp/csv.hpp"
#include "znnqp/errors.hpp"

namespace znnqp::app {

namespace {

namespace fs = std::filesystem;

struct Tally {
  std::size_t checked = 0;
  std::size_t mismatched = 0;

  void compare(std::ostream& msg, const std::string& where, const std::string& stored,
               const std::string& recomputed) {
    ++checked;
    if (stored == recomputed) return;
    ++mismatched;
    msg << fmt::format("mismatch {}: summary has {}, recomputed {}\n", where, stored, recomputed);
  }
};

RunLog run_log_from_csv(const detail::CsvTable& t, double dt) {
  RunLog log;
  log.dt = dt;
  const std::size_t ct = t.column("t"), cr = t.column("res_norm");
  for (const auto& row : t.rows) {
    log.times.push_back(detail::parse_real(row[ct]));
    log.residual_norms.push_back(detail::parse_real(row[cr]));
  }
  return log;
}

TrackLog track_log_from_csv(const detail::CsvTable& t, Eigen::Index dof) {
  TrackLog log;
  const std::size_t ct = t.column("t");
  const std::size_t cq = t.column("q1"), cqd = t.column("qd1");
  const std::size_t cex = t.column("ex"), cr = t.column("res_norm");
  for (const auto& row : t.rows) {
    log.times.push_back(detail::parse_real(row[ct]));
    Vec q(dof), qd(dof);
    for (Eigen::Index i = 0; i < dof; ++i) {
      q[i] = detail::parse_real(row[cq + static_cast<std::size_t>(i)]);
      qd[i] = detail::parse_real(row[cqd + static_cast<std::size_t>(i)]);
    }
    log.q.push_back(q);
    log.qd.push_back(qd);
    log.error.emplace_back(detail::parse_real(row[cex]), detail::parse_real(row[cex + 1]),
                           detail::parse_real(row[cex + 2]));
    log.residual_norms.push_back(detail::parse_real(row[cr]));
  }
  return log;
}

void verify_bench(const Experiment& ex, const fs::path& dir, std::ostream& msg, Tally& tally) {
  const auto summary = detail::read_csv(dir / kBenchSummary);
  const std::size_t c_tc = summary.column("t_c"), c_at = summary.column("res_at_tc");
  const std::size_t c_max = summary.column("res_steady_max"), c_csv = summary.column("csv");
  for (const auto& row : summary.rows) {
    const RunLog log = run_log_from_csv(detail::read_csv(dir / row[c_csv]), ex.dt);
    const double t_c = detail::parse_real(row[c_tc]);
    tally.compare(msg, row[c_csv] + " res_at_tc", row[c_at], format_real(log.residual_at(t_c)));
    tally.compare(msg, row[c_csv] + " res_steady_max", row[c_max],
                  format_real(log.max_residual(t_c, ex.t_end)));
  }
}

void verify_track(const Experiment& ex, const fs::path& dir, std::ostream& msg, Tally& tally) {
  const ArmModel arm = ArmModel::load(ex.arm_file);
  const auto summary = detail::read_csv(dir / kTrackSummary);
  for (const auto& row : summary.rows) {
    const std::string file = row[summary.column("csv")];
    const TrackLog log = track_log_from_csv(detail::read_csv(dir / file), arm.dof());
    const TrackSummary s = summarize(arm, log);
    auto cell = [&](const char* name) { return row[summary.column(name)]; };
    tally.compare(msg, file + " max_ex", cell("max_ex"), format_real(s.max_error.x()));
    tally.compare(msg, file + " max_ey", cell("max_ey"), format_real(s.max_error.y()));
    tally.compare(msg, file + " max_ez", cell("max_ez"), format_real(s.max_error.z()));
    tally.compare(msg, file + " mean_ex", cell("mean_ex"), format_real(s.mean_error.x()));
    tally.compare(msg, file + " mean_ey", cell("mean_ey"), format_real(s.mean_error.y()));
    tally.compare(msg, file + " mean_ez", cell("mean_ez"), format_real(s.mean_error.z()));
    tally.compare(msg, file + " violations", cell("violations"), std::to_string(s.violations()));
    tally.compare(msg, file + " angle_violations", cell("angle_violations"), std::to_string(s.angle_violations));
    tally.compare(msg, file + " velocity_violations", cell("velocity_violations"),
                  std::to_string(s.velocity_violations));
    tally.compare(msg, file + " return_gap", cell("return_gap"), format_real(s.return_gap));
    tally.compare(msg, file + " max_qd", cell("max_qd"), format_real(s.max_joint_speed));
  }
}

}  // namespace

int cmd_verify(const std::filesystem::path& config, const CommandOptions& opts, std::ostream& msg) {
  return detail::guarded(config, opts, msg, [&](const Experiment& ex, const fs::path& dir) {
    Tally tally;
    bool found = false;
    try {
      if (fs::exists(dir / kBenchSummary)) {
        found = true;
        verify_bench(ex, dir, msg, tally);
      }
      if (fs::exists(dir / kTrackSummary)) {
        found = true;
        verify_track(ex, dir, msg, tally);
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      msg << "verify: " << e.what() << '\n';
      return static_cast<int>(kExitMismatch);
    }
    if (!found) {
      msg << "verify: no summary file in " << dir.string() << '\n';
      return static_cast<int>(kExitMismatch);
    }
    msg << fmt::format("verify: {} values checked, {} mismatched\n", tally.checked, tally.mismatched);
    return static_cast<int>(tally.mismatched ? kExitMismatch : kExitOk);
  });
}

}  // namespace znnqp::app
