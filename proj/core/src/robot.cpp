#include "znnqp/robot.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "znnqp/csv.hpp"
#include "znnqp/errors.hpp"
#include "znnqp/oracle.hpp"

namespace znnqp {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Matrix4d link_transform(const ArmModel::Joint& j, double q) {
  const double ca = std::cos(j.alpha), sa = std::sin(j.alpha);
  const double th = q + j.theta_offset;
  const double ct = std::cos(th), st = std::sin(th);
  Eigen::Matrix4d T;
  T << ct, -st, 0, j.a,
       st * ca, ct * ca, -sa, -sa * j.d,
       st * sa, ct * sa, ca, ca * j.d,
       0, 0, 0, 1;
  return T;
}

void check_q(const ArmModel& arm, const Vec& q) {
  if (q.size() != arm.dof()) {
    throw DimensionMismatch(fmt::format("joint vector has {} entries, arm has {}", q.size(), arm.dof()));
  }
}

// Frames after each joint plus the tool point, in the base frame.
std::vector<Eigen::Matrix4d> chain(const ArmModel& arm, const Vec& q, Vec3& tool) {
  check_q(arm, q);
  std::vector<Eigen::Matrix4d> frames;
  frames.reserve(arm.joints.size());
  Eigen::Matrix4d T = Eigen::Matrix4d::Identity();
  for (std::size_t i = 0; i < arm.joints.size(); ++i) {
    T = T * link_transform(arm.joints[i], q[static_cast<Eigen::Index>(i)]);
    frames.push_back(T);
  }
  tool = (T * arm.tool_offset.homogeneous()).head<3>();
  return frames;
}

// Sine-squared taper, 0 at the threshold and 1 at the limit.
double taper(double x, double threshold, double span) {
  const double inner = std::sin(0.5 * kPi * (x - threshold) / span);
  const double outer = std::sin(0.5 * kPi * inner * inner);
  return outer * outer;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

Vec read_vec(const YAML::Node& node, const char* key, const std::string& origin, double scale = 1.0) {
  if (!node.IsSequence()) throw ConfigError(fmt::format("{}: '{}' must be a list", origin, key));
  Vec out(static_cast<Eigen::Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i) out[static_cast<Eigen::Index>(i)] = node[i].as<double>() * scale;
  return out;
}

// Reads `key` (radians) or `key_deg` (degrees).
Vec read_angles(const YAML::Node& root, const std::string& key, const std::string& origin) {
  if (root[key]) return read_vec(root[key], key.c_str(), origin);
  const std::string deg = key + "_deg";
  if (root[deg]) return read_vec(root[deg], deg.c_str(), origin, kPi / 180.0);
  throw ConfigError(fmt::format("{}: missing '{}' (or '{}')", origin, key, deg));
}

}  // namespace

void ArmModel::validate() const {
  const Eigen::Index n = dof();
  if (n < 1) throw ConfigError("arm has no joints");
  auto len = [&](const Vec& v, const char* what) {
    if (v.size() != n) throw ConfigError(fmt::format("arm field {} has {} entries, expected {}", what, v.size(), n));
    if (!all_finite(v)) throw ConfigError(fmt::format("arm field {} is not finite", what));
  };
  len(q_min, "q_min");
  len(q_max, "q_max");
  len(qd_min, "qd_min");
  len(qd_max, "qd_max");
  len(q0, "q0");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(q_min[i] < q_max[i])) throw ConfigError(fmt::format("arm joint {}: q_min must be < q_max", i + 1));
    if (!(qd_min[i] < 0 && qd_max[i] > 0)) throw ConfigError(fmt::format("arm joint {}: need qd_min < 0 < qd_max", i + 1));
    if (q0[i] < q_min[i] || q0[i] > q_max[i]) throw ConfigError(fmt::format("arm joint {}: q0 outside limits", i + 1));
    // The taper spans [kappa1 q_min, q_min]; it degenerates unless q_min < 0 < q_max.
    if (!(q_min[i] < 0 && q_max[i] > 0)) throw ConfigError(fmt::format("arm joint {}: limits must straddle 0", i + 1));
  }
  if (!(iota >= 0)) throw ConfigError("arm iota must be >= 0");
  if (!(kappa1 > 0 && kappa1 < 1)) throw ConfigError("arm kappa1 must lie in (0, 1)");
  if (!(kappa2 > 0 && kappa2 < 1)) throw ConfigError("arm kappa2 must lie in (0, 1)");
}

ArmModel ArmModel::load(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(fmt::format("cannot open arm file {}", path.string()));
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), path.string());
}

ArmModel ArmModel::parse(const std::string& text, const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(fmt::format("{}: {}", origin, e.what()));
  }
  try {
    if (!root.IsMap()) throw ConfigError(fmt::format("{}: top level must be a mapping", origin));
    if (!root["schema"] || root["schema"].as<int>() != 1) {
      throw ConfigError(fmt::format("{}: expected 'schema: 1'", origin));
    }
    ArmModel arm;
    arm.name = root["name"] ? root["name"].as<std::string>() : std::string("arm");
    if (root["convention"] && lower(root["convention"].as<std::string>()) != "modified-dh") {
      throw ConfigError(fmt::format("{}: only 'modified-dh' joint tables are supported", origin));
    }
    const YAML::Node joints = root["joints"];
    if (!joints || !joints.IsSequence() || joints.size() == 0) {
      throw ConfigError(fmt::format("{}: 'joints' must be a non-empty list", origin));
    }
    for (const auto& j : joints) {
      Joint jt;
      jt.a = j["a"].as<double>(0.0);
      jt.d = j["d"].as<double>(0.0);
      if (j["alpha_deg"]) jt.alpha = j["alpha_deg"].as<double>() * kPi / 180.0;
      else jt.alpha = j["alpha"].as<double>(0.0);
      jt.theta_offset = j["theta_offset"].as<double>(0.0);
      arm.joints.push_back(jt);
    }
    if (root["tool_offset"]) {
      const Vec t = read_vec(root["tool_offset"], "tool_offset", origin);
      if (t.size() != 3) throw ConfigError(fmt::format("{}: tool_offset needs 3 entries", origin));
      arm.tool_offset = t;
    }
    arm.q_min = read_angles(root, "q_min", origin);
    arm.q_max = read_angles(root, "q_max", origin);
    if (!root["qd_min"] || !root["qd_max"]) throw ConfigError(fmt::format("{}: missing qd_min/qd_max", origin));
    arm.qd_min = read_vec(root["qd_min"], "qd_min", origin);
    arm.qd_max = read_vec(root["qd_max"], "qd_max", origin);
    arm.q0 = read_angles(root, "q0", origin);
    arm.iota = root["iota"].as<double>(1.0);
    arm.kappa1 = root["kappa1"].as<double>(0.9);
    arm.kappa2 = root["kappa2"].as<double>(0.9);
    arm.validate();
    return arm;
  } catch (const YAML::Exception& e) {
    throw ConfigError(fmt::format("{}: {}", origin, e.what()));
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind(origin, 0) == 0) throw;
    throw ConfigError(fmt::format("{}: {}", origin, msg));
  }
}

Vec3 fk(const ArmModel& arm, const Vec& q) {
  Vec3 tool;
  chain(arm, q, tool);
  return tool;
}

Mat jacobian(const ArmModel& arm, const Vec& q) {
  Vec3 tool;
  const auto frames = chain(arm, q, tool);
  Mat J(3, arm.dof());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const Vec3 z = frames[i].block<3, 1>(0, 2);
    const Vec3 o = frames[i].block<3, 1>(0, 3);
    J.col(static_cast<Eigen::Index>(i)) = z.cross(tool - o);
  }
  return J;
}

VelocityBounds smooth_bounds(const ArmModel& arm, const Vec& q) {
  check_q(arm, q);
  VelocityBounds out{arm.qd_min, arm.qd_max, false};
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    double x = q[i];
    if (x < arm.q_min[i] || x > arm.q_max[i]) {
      out.clamped = true;
      x = std::clamp(x, arm.q_min[i], arm.q_max[i]);
    }
    const double xi1 = arm.kappa1 * arm.q_min[i];
    const double xi2 = arm.kappa2 * arm.q_max[i];
    if (x < xi1) out.d_minus[i] = arm.qd_min[i] * (1.0 - taper(x, xi1, arm.q_min[i] - xi1));
    if (x > xi2) out.d_plus[i] = arm.qd_max[i] * (1.0 - taper(x, xi2, arm.q_max[i] - xi2));
  }
  return out;
}

std::string_view to_string(TrajectoryKind kind) noexcept {
  switch (kind) {
    case TrajectoryKind::Heart:
      return "heart";
    case TrajectoryKind::Lissajous:
      return "lissajous";
    case TrajectoryKind::Plum:
      return "plum";
  }
  return "?";
}

std::optional<TrajectoryKind> parse_trajectory_kind(std::string_view name) noexcept {
  const std::string s = lower(name);
  if (s == "heart") return TrajectoryKind::Heart;
  if (s == "lissajous") return TrajectoryKind::Lissajous;
  if (s == "plum" || s == "plum-blossom") return TrajectoryKind::Plum;
  return std::nullopt;
}

void TrajectorySpec::validate() const {
  if (!(period > 0)) throw DomainError("trajectory period must be > 0");
  switch (kind) {
    case TrajectoryKind::Heart:
      if (!(heart_a > 0)) throw DomainError("heart scale a must be > 0");
      break;
    case TrajectoryKind::Lissajous:
      if (!(liss_A > 0 && liss_B > 0 && liss_a > 0 && liss_b > 0)) {
        throw DomainError("Lissajous amplitudes and frequencies must be > 0");
      }
      break;
    case TrajectoryKind::Plum:
      if (!(plum_r > 0) || plum_n < 1) throw DomainError("plum radius must be > 0 and n >= 1");
      break;
  }
}

Reference reference(const TrajectorySpec& tr, double t) {
  tr.validate();
  if (!(t >= 0.0 && t <= tr.period)) {
    throw DomainError(fmt::format("reference time {} outside [0, {}]", t, tr.period));
  }
  const double T = tr.period;
  Reference r{Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  switch (tr.kind) {
    case TrajectoryKind::Heart: {
      const double a = tr.heart_a;
      const double th = 2 * kPi * t / T, w = 2 * kPi / T;
      r.w << a * (2 * std::sin(th) - std::sin(2 * th)), a * (2 * std::cos(th) - std::cos(2 * th)) - a, 0;
      r.wd << a * (2 * std::cos(th) - 2 * std::cos(2 * th)) * w,
          a * (-2 * std::sin(th) + 2 * std::sin(2 * th)) * w, 0;
      r.wdd << a * (-2 * std::sin(th) + 4 * std::sin(2 * th)) * w * w,
          a * (-2 * std::cos(th) + 4 * std::cos(2 * th)) * w * w, 0;
      break;
    }
    case TrajectoryKind::Lissajous: {
      const double wa = 2 * kPi * tr.liss_a / T, wb = 2 * kPi * tr.liss_b / T;
      const double pa = wa * t + tr.liss_delta, pb = wb * t;
      r.w << tr.liss_A * std::sin(pa), tr.liss_B * std::sin(pb), 0;
      r.wd << tr.liss_A * wa * std::cos(pa), tr.liss_B * wb * std::cos(pb), 0;
      r.wdd << -tr.liss_A * wa * wa * std::sin(pa), -tr.liss_B * wb * wb * std::sin(pb), 0;
      break;
    }
    case TrajectoryKind::Plum: {
      const double rad = tr.plum_r, n = tr.plum_n;
      const double s = std::sin(kPi * t / (2 * T));
      const double ph = 2 * kPi * s * s;
      // phi = pi (1 - cos(pi t / T))
      const double phd = kPi * kPi / T * std::sin(kPi * t / T);
      const double phdd = kPi * kPi * kPi / (T * T) * std::cos(kPi * t / T);
      const double dx = rad * (-std::sin(ph) - std::sin(n * ph));
      const double dy = rad * (std::cos(ph) + std::cos(n * ph));
      const double ddx = rad * (-std::cos(ph) - n * std::cos(n * ph));
      const double ddy = rad * (-std::sin(ph) - n * std::sin(n * ph));
      r.w << rad * (std::cos(ph) + std::cos(n * ph) / n), rad * (std::sin(ph) + std::sin(n * ph) / n), 0;
      r.wd << dx * phd, dy * phd, 0;
      r.wdd << ddx * phd * phd + dx * phdd, ddy * phd * phd + dy * phdd, 0;
      break;
    }
  }
  r.w += tr.center.value_or(Vec3::Zero());
  r.w.z() += tr.z0;
  return r;
}

TrajectorySpec anchored(const TrajectorySpec& traj, const ArmModel& arm) {
  TrajectorySpec out = traj;
  out.center = Vec3::Zero();
  out.z0 = 0.0;
  out.center = fk(arm, arm.q0) - reference(out, 0.0).w;
  return out;
}

QpSample kin_qp_at(const ArmModel& arm, const TrajectorySpec& traj, const KinState& state,
                   const KinHistory* previous, double dt) {
  check_q(arm, state.q);
  check_q(arm, state.qd);
  const Eigen::Index n = arm.dof();
  const Reference ref = reference(traj, state.t);
  const VelocityBounds vb = smooth_bounds(arm, state.q);

  QpSample s;
  s.t = state.t;
  QpData& v = s.value;
  v.H = Mat::Identity(n, n);
  v.rho = arm.iota * (state.q - arm.q0);
  v.A = jacobian(arm, state.q);
  v.b = ref.wd;
  v.C.resize(2 * n, n);
  v.C << Mat::Identity(n, n), -Mat::Identity(n, n);
  v.d.resize(2 * n);
  v.d << vb.d_plus, -vb.d_minus;

  QpData& r = s.rate;
  r = QpData::zeros(v.dims());
  r.rho = arm.iota * state.qd;
  r.b = ref.wdd;
  if (previous) {
    if (!(dt > 0)) throw DomainError("kin_qp_at: dt must be positive");
    if (previous->J.rows() != 3 || previous->J.cols() != n || previous->d.size() != 2 * n) {
      throw DimensionMismatch("kin_qp_at: history does not match the arm");
    }
    r.A = (v.A - previous->J) / dt;
    r.d = (v.d - previous->d) / dt;
  }
  return s;
}

void TrackLog::write_csv(std::ostream& out) const {
  const Eigen::Index n = q.empty() ? 0 : q.front().size();
  std::vector<std::string> header{"t"};
  for (Eigen::Index i = 1; i <= n; ++i) header.push_back(fmt::format("q{}", i));
  for (Eigen::Index i = 1; i <= n; ++i) header.push_back(fmt::format("qd{}", i));
  for (const char* c : {"ex", "ey", "ez", "res_norm"}) header.emplace_back(c);
  CsvWriter w(out, header);
  std::vector<double> row;
  for (std::size_t k = 0; k < times.size(); ++k) {
    row.clear();
    row.push_back(times[k]);
    for (Eigen::Index i = 0; i < n; ++i) row.push_back(q[k][i]);
    for (Eigen::Index i = 0; i < n; ++i) row.push_back(qd[k][i]);
    for (int a = 0; a < 3; ++a) row.push_back(error[k][a]);
    row.push_back(residual_norms[k]);
    w.row(row);
  }
}

void TrackLog::write_csv(const std::filesystem::path& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  write_csv(f);
  if (!f) throw Error("failed writing " + path.string());
}

TrackSummary summarize(const ArmModel& arm, const TrackLog& log) {
  TrackSummary s;
  if (log.size() == 0) return s;
  for (std::size_t k = 0; k < log.size(); ++k) {
    s.max_error = s.max_error.cwiseMax(log.error[k]);
    s.mean_error += log.error[k];
    for (Eigen::Index i = 0; i < arm.dof(); ++i) {
      if (log.q[k][i] < arm.q_min[i] || log.q[k][i] > arm.q_max[i]) ++s.angle_violations;
      if (log.qd[k][i] < arm.qd_min[i] - kVelocityLimitSlack ||
          log.qd[k][i] > arm.qd_max[i] + kVelocityLimitSlack) {
        ++s.velocity_violations;
      }
    }
    s.max_joint_speed = std::max(s.max_joint_speed, log.qd[k].cwiseAbs().maxCoeff());
  }
  s.mean_error /= static_cast<double>(log.size());
  s.return_gap = (log.q.back() - log.q.front()).cwiseAbs().maxCoeff();
  s.final_residual = log.residual_norms.back();
  return s;
}

TrackLog track(const ArmModel& arm, const TrajectorySpec& traj_in, const ModelSpec& model,
               const NoiseChannel& noise, double dt) {
  arm.validate();
  traj_in.validate();
  if (!(dt > 0)) throw DomainError("track: dt must be positive");
  const TrajectorySpec traj = traj_in.center ? traj_in : anchored(traj_in, arm);
  const Eigen::Index n = arm.dof();
  const QpDims dims{n, 3, 2 * n};
  if (noise.dim() != dims.total()) {
    throw DimensionMismatch(fmt::format("noise has dim {}, tracking QP needs {}", noise.dim(), dims.total()));
  }

  const auto steps = static_cast<std::uint64_t>(std::llround(traj.period / dt));
  TrackLog log;
  log.times.reserve(steps + 1);

  Stepper stepper(model, dt);
  Vec q = arm.q0;
  KinState state{q, Vec::Zero(n), 0.0};
  QpSample first = kin_qp_at(arm, traj, state, nullptr, dt);
  Vec y = solve_at(first.value, 0.0).y();
  std::optional<KinHistory> history;

  for (std::uint64_t k = 0; k <= steps; ++k) {
    const double t = std::min(static_cast<double>(k) * dt, traj.period);
    state.q = q;
    state.qd = y.head(n);
    state.t = t;
    const QpSample sample = kin_qp_at(arm, traj, state, history ? &*history : nullptr, dt);
    history = KinHistory{sample.value.A, sample.value.d};

    const Vec3 w = reference(traj, t).w;
    log.times.push_back(t);
    log.q.push_back(q);
    log.qd.push_back(y.head(n));
    log.error.push_back((fk(arm, q) - w).cwiseAbs());

    const double model_t = std::max(t, dt);
    if (k == steps) {
      log.residual_norms.push_back(stepper.evaluate(sample, y, model_t).res_norm);
      break;
    }
    const Vec qd = y.head(n);
    const auto o = stepper.advance(sample, y, model_t, noise.sample(t, k));
    log.residual_norms.push_back(o.res_norm);
    if (o.degenerate) log.degenerate_steps.push_back(k);
    q += dt * qd;

    if (!(y.cwiseAbs().maxCoeff() <= kBlowupThreshold) || !all_finite(q)) {
      throw NumericalBlowup(fmt::format("tracking diverged at t = {}", t + dt), t + dt, RunLog{});
    }
  }
  return log;
}

}  // namespace znnqp
