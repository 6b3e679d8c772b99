#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "znnqp/integrator.hpp"
#include "znnqp/models.hpp"
#include "znnqp/noise.hpp"
#include "znnqp/tvqp.hpp"

namespace znnqp {

using Vec3 = Eigen::Vector3d;

/// Revolute serial arm in modified Denavit-Hartenberg form:
/// T_i = RotX(alpha) TransX(a) RotZ(q_i + theta_offset) TransZ(d).
struct ArmModel {
  struct Joint {
    double a = 0.0;
    double alpha = 0.0;
    double d = 0.0;
    double theta_offset = 0.0;
  };

  std::string name;
  std::vector<Joint> joints;
  Vec3 tool_offset = Vec3::Zero();  ///< end-effector point in the last joint frame
  Vec q_min, q_max;                 ///< rad
  Vec qd_min, qd_max;               ///< rad/s
  double iota = 1.0;
  double kappa1 = 0.9;
  double kappa2 = 0.9;
  Vec q0;

  Eigen::Index dof() const noexcept { return static_cast<Eigen::Index>(joints.size()); }
  /// Throws ConfigError describing the first violated invariant.
  void validate() const;

  /// YAML arm description, `schema: 1`. Throws ConfigError naming the file.
  static ArmModel load(const std::filesystem::path& path);
  static ArmModel parse(const std::string& yaml_text, const std::string& origin = "<string>");
};

Vec3 fk(const ArmModel& arm, const Vec& q);
/// Position Jacobian, 3 x dof.
Mat jacobian(const ArmModel& arm, const Vec& q);

struct VelocityBounds {
  Vec d_minus;
  Vec d_plus;
  bool clamped = false;  ///< q was outside [q_min, q_max] and got clamped
};

/// Joint-velocity bounds tapered with a sine-squared profile near the angle limits.
VelocityBounds smooth_bounds(const ArmModel& arm, const Vec& q);

enum class TrajectoryKind { Heart, Lissajous, Plum };

std::string_view to_string(TrajectoryKind kind) noexcept;
std::optional<TrajectoryKind> parse_trajectory_kind(std::string_view name) noexcept;

struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::Plum;
  double period = 10.0;
  /// Offset added to the curve; unset means "start at the arm's home point".
  std::optional<Vec3> center;
  double z0 = 0.0;
  double heart_a = 0.02;
  double liss_A = 0.06, liss_B = 0.06, liss_a = 3.0, liss_b = 2.0;
  double liss_delta = 1.5707963267948966;
  double plum_r = 0.1;
  int plum_n = 5;

  void validate() const;
};

struct Reference {
  Vec3 w;
  Vec3 wd;
  Vec3 wdd;
};

/// Desired end-effector position and its first two derivatives.
/// Throws DomainError for t outside [0, period].
Reference reference(const TrajectorySpec& traj, double t);

/// traj with center filled so that reference(traj, 0).w == fk(arm, arm.q0).
TrajectorySpec anchored(const TrajectorySpec& traj, const ArmModel& arm);

struct KinState {
  Vec q;
  Vec qd;
  double t = 0.0;
};

/// J and d of the previous step, for backward differences.
struct KinHistory {
  Mat J;
  Vec d;
};

/// Velocity-level kinematic QP at state.t: H = I, rho = iota (q - q0), A = J(q),
/// b = wd(t), C = [I; -I], d = [d+; -d-]. Rates of A and d are backward
/// differences against `previous` (zero when null).
QpSample kin_qp_at(const ArmModel& arm, const TrajectorySpec& traj, const KinState& state,
                   const KinHistory* previous = nullptr, double dt = 1e-3);

struct TrackLog {
  std::vector<double> times;
  std::vector<Vec> q;
  std::vector<Vec> qd;
  std::vector<Vec3> error;  ///< |fk(q) - w(t)| per axis
  std::vector<double> residual_norms;
  std::vector<std::uint64_t> degenerate_steps;

  std::size_t size() const noexcept { return times.size(); }
  void write_csv(std::ostream& out) const;
  void write_csv(const std::filesystem::path& path) const;
};

struct TrackSummary {
  Vec3 max_error = Vec3::Zero();
  Vec3 mean_error = Vec3::Zero();
  std::size_t angle_violations = 0;
  std::size_t velocity_violations = 0;
  double return_gap = 0.0;  ///< ||q(T) - q(0)||_inf
  double max_joint_speed = 0.0;
  double final_residual = 0.0;

  std::size_t violations() const noexcept { return angle_violations + velocity_violations; }
};

inline constexpr double kVelocityLimitSlack = 1e-9;

TrackSummary summarize(const ArmModel& arm, const TrackLog& log);

/// Closed-loop tracking over [0, period]. The KKT state starts at the oracle
/// solution of the QP at q0, joints follow q <- q + dt * qd, and model time is
/// max(t, dt). Throws NumericalBlowup.
TrackLog track(const ArmModel& arm, const TrajectorySpec& traj, const ModelSpec& model,
               const NoiseChannel& noise, double dt);

}  // namespace znnqp
