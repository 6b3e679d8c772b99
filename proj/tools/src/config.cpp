#include "znnqp/app/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "znnqp/errors.hpp"
#include "znnqp/problems.hpp"

namespace znnqp::app {

namespace {

using Keys = std::set<std::string>;

void only_keys(const YAML::Node& node, const Keys& allowed, const std::string& where) {
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError(fmt::format("{}: unknown key '{}'", where, key));
  }
}

double real(const YAML::Node& n, const std::string& field) {
  try {
    const double v = n.as<double>();
    if (!std::isfinite(v)) throw ConfigError(fmt::format("{}: must be finite", field));
    return v;
  } catch (const YAML::Exception&) {
    throw ConfigError(fmt::format("{}: expected a number", field));
  }
}

std::vector<double> reals(const YAML::Node& n, const std::string& field) {
  std::vector<double> out;
  if (n.IsSequence()) {
    for (std::size_t i = 0; i < n.size(); ++i) out.push_back(real(n[i], fmt::format("{}[{}]", field, i)));
  } else {
    out.push_back(real(n, field));
  }
  return out;
}

Mat matrix(const YAML::Node& n, const std::string& field, Eigen::Index cols_hint = -1) {
  if (!n || !n.IsSequence()) throw ConfigError(fmt::format("{}: expected a list of rows", field));
  if (n.size() == 0) return Mat::Zero(0, std::max<Eigen::Index>(cols_hint, 0));
  Mat M;
  for (std::size_t r = 0; r < n.size(); ++r) {
    const auto row = reals(n[r], fmt::format("{}[{}]", field, r));
    if (r == 0) M.resize(static_cast<Eigen::Index>(n.size()), static_cast<Eigen::Index>(row.size()));
    if (static_cast<Eigen::Index>(row.size()) != M.cols()) {
      throw ConfigError(fmt::format("{}: ragged rows", field));
    }
    for (std::size_t c = 0; c < row.size(); ++c) M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
  }
  return M;
}

Vec vector(const YAML::Node& n, const std::string& field) {
  if (!n) throw ConfigError(fmt::format("{}: missing", field));
  if (!n.IsSequence()) throw ConfigError(fmt::format("{}: expected a list", field));
  const auto v = reals(n, field);
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

const Keys kModelKeys{"kind", "alpha", "gamma", "t_c", "zeta", "Delta", "p", "kappa",
                      "gamma2", "gamma3", "xi", "fo_eps", "k", "euler_gain_cap"};

ModelEntry parse_model(const YAML::Node& n, const std::string& where) {
  if (!n.IsMap()) throw ConfigError(fmt::format("{}: expected a mapping", where));
  only_keys(n, kModelKeys, where);
  if (!n["kind"]) throw ConfigError(fmt::format("{}.kind: missing", where));
  const auto name = n["kind"].as<std::string>();
  const auto kind = parse_model_kind(name);
  if (!kind) throw ConfigError(fmt::format("{}.kind: unknown model '{}'", where, name));
  ModelEntry e;
  e.kind = *kind;
  if (n["alpha"]) {
    e.alphas = reals(n["alpha"], where + ".alpha");
    if (e.alphas.empty()) throw ConfigError(fmt::format("{}.alpha: list is empty", where));
  }
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    if (key == "kind" || key == "alpha") continue;
    if (key == "euler_gain_cap") {
      e.euler_gain_cap = kv.second.as<bool>();
      continue;
    }
    e.overrides[key] = real(kv.second, where + "." + key);
  }
  return e;
}

NoiseChannel parse_channel(const YAML::Node& n, const std::string& where) {
  if (!n.IsMap()) throw ConfigError(fmt::format("{}: expected a mapping", where));
  if (!n["kind"]) throw ConfigError(fmt::format("{}.kind: missing", where));
  const auto kind = n["kind"].as<std::string>();
  if (kind == "zero") {
    only_keys(n, {"kind", "name"}, where);
    return NoiseChannel::zero(1);
  }
  if (kind == "sinusoid") {
    only_keys(n, {"kind", "name", "amp", "freq", "phase"}, where);
    if (!n["amp"]) throw ConfigError(fmt::format("{}.amp: missing", where));
    const double amp = real(n["amp"], where + ".amp");
    const double freq = n["freq"] ? real(n["freq"], where + ".freq") : 1.0;
    if (amp < 0) throw ConfigError(fmt::format("{}.amp: must be >= 0", where));
    if (n["phase"]) {
      const Vec ph = vector(n["phase"], where + ".phase");
      return NoiseChannel::sinusoid(ph.size(), amp, freq, ph);
    }
    return NoiseChannel::sinusoid(1, amp, freq);
  }
  if (kind == "white") {
    only_keys(n, {"kind", "name", "amp"}, where);
    if (!n["amp"]) throw ConfigError(fmt::format("{}.amp: missing", where));
    const double amp = real(n["amp"], where + ".amp");
    if (amp < 0) throw ConfigError(fmt::format("{}.amp: must be >= 0", where));
    return NoiseChannel::bounded_white(1, amp, 0);
  }
  if (kind == "composite") {
    only_keys(n, {"kind", "name", "parts"}, where);
    const auto parts = n["parts"];
    if (!parts || !parts.IsSequence() || parts.size() == 0) {
      throw ConfigError(fmt::format("{}.parts: expected a non-empty list", where));
    }
    std::vector<NoiseChannel> chans;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      chans.push_back(parse_channel(parts[i], fmt::format("{}.parts[{}]", where, i)));
    }
    const Eigen::Index dim = chans.front().dim();
    for (auto& c : chans) {
      if (c.dim() != dim) {
        if (dim != 1 && c.dim() != 1) throw ConfigError(fmt::format("{}: part dimensions differ", where));
      }
    }
    Eigen::Index common = 1;
    for (auto& c : chans) common = std::max(common, c.dim());
    for (auto& c : chans) c = c.resized(common);
    return NoiseChannel::composite(std::move(chans));
  }
  throw ConfigError(fmt::format("{}.kind: unknown noise kind '{}'", where, kind));
}

QpData parse_static_qp(const YAML::Node& n) {
  if (!n || !n.IsMap()) throw ConfigError("qp: expected a mapping with H, rho, A, b, C, d");
  only_keys(n, {"H", "rho", "A", "b", "C", "d"}, "qp");
  QpData q;
  q.H = matrix(n["H"], "qp.H");
  const Eigen::Index dim = q.H.cols();
  q.rho = n["rho"] ? vector(n["rho"], "qp.rho") : Vec::Zero(dim);
  q.A = n["A"] ? matrix(n["A"], "qp.A", dim) : Mat::Zero(0, dim);
  q.b = n["b"] ? vector(n["b"], "qp.b") : Vec::Zero(0);
  q.C = n["C"] ? matrix(n["C"], "qp.C", dim) : Mat::Zero(0, dim);
  q.d = n["d"] ? vector(n["d"], "qp.d") : Vec::Zero(0);
  try {
    q.check(q.dims());
  } catch (const DimensionMismatch& e) {
    throw ConfigError(std::string("qp: ") + e.what());
  }
  if (q.H.rows() != q.H.cols()) throw ConfigError("qp.H: must be square");
  return q;
}

TrajectorySpec parse_trajectory(const YAML::Node& n) {
  if (!n || !n.IsMap()) throw ConfigError("trajectory: expected a mapping");
  only_keys(n, {"kind", "period", "center", "z0", "a", "A", "B", "freq_a", "freq_b", "delta", "r", "n"},
            "trajectory");
  TrajectorySpec t;
  if (!n["kind"]) throw ConfigError("trajectory.kind: missing");
  const auto kind = parse_trajectory_kind(n["kind"].as<std::string>());
  if (!kind) throw ConfigError(fmt::format("trajectory.kind: unknown trajectory '{}'", n["kind"].as<std::string>()));
  t.kind = *kind;
  if (n["period"]) t.period = real(n["period"], "trajectory.period");
  if (n["center"]) {
    const Vec c = vector(n["center"], "trajectory.center");
    if (c.size() != 3) throw ConfigError("trajectory.center: needs 3 entries");
    t.center = Vec3(c);
  }
  if (n["z0"]) t.z0 = real(n["z0"], "trajectory.z0");
  if (n["a"]) t.heart_a = real(n["a"], "trajectory.a");
  if (n["A"]) t.liss_A = real(n["A"], "trajectory.A");
  if (n["B"]) t.liss_B = real(n["B"], "trajectory.B");
  if (n["freq_a"]) t.liss_a = real(n["freq_a"], "trajectory.freq_a");
  if (n["freq_b"]) t.liss_b = real(n["freq_b"], "trajectory.freq_b");
  if (n["delta"]) t.liss_delta = real(n["delta"], "trajectory.delta");
  if (n["r"]) t.plum_r = real(n["r"], "trajectory.r");
  if (n["n"]) t.plum_n = n["n"].as<int>();
  try {
    t.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("trajectory: ") + e.what());
  }
  return t;
}

}  // namespace

ModelSpec ModelEntry::spec(double alpha, double noise_bound) const {
  ModelSpec s = benchmark_preset(kind, noise_bound, alpha);
  bool zeta_set = false, xi_set = false, gamma3_set = false;
  for (const auto& [key, v] : overrides) {
    if (key == "gamma") s.gamma = v;
    else if (key == "t_c") s.t_c = v;
    else if (key == "zeta") { s.zeta = v; zeta_set = true; }
    else if (key == "Delta") s.Delta = v;
    else if (key == "p") s.p_exp = v;
    else if (key == "kappa") s.kappa = v;
    else if (key == "gamma2") s.gamma2 = v;
    else if (key == "gamma3") { s.gamma3 = v; gamma3_set = true; }
    else if (key == "xi") { s.xi = v; xi_set = true; }
    else if (key == "fo_eps") s.fo_eps = v;
    else if (key == "k") s.pragnn_k = v;
  }
  // Derived defaults follow an explicit zeta or gamma.
  if (zeta_set && !gamma3_set) s.gamma3 = s.zeta;
  if (!xi_set) s.xi = s.zeta / s.gamma;
  if (euler_gain_cap) s.euler_gain_cap = *euler_gain_cap;
  return s;
}

std::vector<double> TimeGrid::points() const {
  const auto n = static_cast<std::size_t>(std::llround((stop - start) / step));
  std::vector<double> out(n + 1);
  for (std::size_t i = 0; i <= n; ++i) out[i] = start + static_cast<double>(i) * step;
  return out;
}

Experiment parse_experiment(const std::string& text, const std::filesystem::path& base_dir,
                            const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(fmt::format("{}: {}", origin, e.what()));
  }
  try {
    if (!root.IsMap()) throw ConfigError("top level must be a mapping");
    only_keys(root,
              {"schema", "name", "problem", "qp", "arm", "trajectory", "models", "noise", "dt",
               "t_end", "record_every", "seeds", "init", "diagnostics", "grid", "output_dir"},
              "config");
    Experiment ex;
    if (!root["schema"]) throw ConfigError("schema: missing (expected 1)");
    ex.schema = root["schema"].as<int>();
    if (ex.schema != 1) throw ConfigError(fmt::format("schema: unsupported version {}", ex.schema));
    ex.name = root["name"] ? root["name"].as<std::string>() : std::string("run");

    const std::string problem = root["problem"] ? root["problem"].as<std::string>() : "builtin-eq25";
    if (problem == "builtin-eq25") {
      ex.problem = ProblemKind::Builtin;
    } else if (problem == "static") {
      ex.problem = ProblemKind::Static;
      ex.static_qp = parse_static_qp(root["qp"]);
    } else if (problem == "robot") {
      ex.problem = ProblemKind::Robot;
      if (!root["arm"]) throw ConfigError("arm: missing (robot problems need an arm file)");
      ex.arm_file = base_dir / root["arm"].as<std::string>();
      ex.trajectory = parse_trajectory(root["trajectory"]);
      ex.t_end = ex.trajectory.period;
    } else {
      throw ConfigError(fmt::format("problem: unknown problem '{}'", problem));
    }

    if (root["models"]) {
      const auto models = root["models"];
      if (!models.IsSequence()) throw ConfigError("models: expected a list");
      for (std::size_t i = 0; i < models.size(); ++i) {
        ex.models.push_back(parse_model(models[i], fmt::format("models[{}]", i)));
      }
    }

    if (root["noise"]) {
      const auto noise = root["noise"];
      const auto add = [&](const YAML::Node& n, const std::string& where) {
        NoiseScenario sc;
        sc.channel = parse_channel(n, where);
        sc.name = n["name"] ? n["name"].as<std::string>() : sc.channel.describe();
        ex.noises.push_back(std::move(sc));
      };
      if (noise.IsSequence()) {
        for (std::size_t i = 0; i < noise.size(); ++i) add(noise[i], fmt::format("noise[{}]", i));
      } else {
        add(noise, "noise");
      }
    } else {
      ex.noises.push_back({"zero", NoiseChannel::zero(1)});
    }

    if (root["dt"]) ex.dt = real(root["dt"], "dt");
    if (!(ex.dt > 0)) throw ConfigError("dt: must be > 0");
    if (root["t_end"]) {
      if (ex.problem == ProblemKind::Robot) throw ConfigError("t_end: robot runs last one trajectory period");
      ex.t_end = real(root["t_end"], "t_end");
    }
    if (ex.problem != ProblemKind::Robot && !(ex.t_end > ex.dt)) throw ConfigError("t_end: must exceed dt");
    if (root["record_every"]) {
      const int r = root["record_every"].as<int>();
      if (r < 1) throw ConfigError("record_every: must be >= 1");
      ex.record_every = static_cast<std::size_t>(r);
    }
    if (root["seeds"]) {
      ex.seeds.clear();
      const auto s = root["seeds"];
      if (s.IsSequence()) {
        for (const auto& v : s) ex.seeds.push_back(v.as<std::uint64_t>());
      } else {
        ex.seeds.push_back(s.as<std::uint64_t>());
      }
      if (ex.seeds.empty()) throw ConfigError("seeds: list is empty");
    }
    if (root["init"]) {
      only_keys(root["init"], {"perturbation"}, "init");
      if (root["init"]["perturbation"]) ex.init_radius = real(root["init"]["perturbation"], "init.perturbation");
      if (ex.init_radius < 0) throw ConfigError("init.perturbation: must be >= 0");
    }
    if (root["diagnostics"]) {
      only_keys(root["diagnostics"], {"lyapunov"}, "diagnostics");
      ex.lyapunov = root["diagnostics"]["lyapunov"].as<bool>(false);
    }
    if (root["grid"]) {
      const auto g = root["grid"];
      only_keys(g, {"start", "stop", "step"}, "grid");
      if (g["start"]) ex.grid.start = real(g["start"], "grid.start");
      if (g["stop"]) ex.grid.stop = real(g["stop"], "grid.stop");
      if (g["step"]) ex.grid.step = real(g["step"], "grid.step");
      if (!(ex.grid.step > 0) || ex.grid.stop < ex.grid.start) {
        throw ConfigError("grid: need step > 0 and stop >= start");
      }
    }
    ex.output_dir = root["output_dir"] ? root["output_dir"].as<std::string>() : ("out/" + slug(ex.name));

    // Each (model, alpha, noise) must give a valid parameter set.
    for (std::size_t i = 0; i < ex.models.size(); ++i) {
      for (double a : ex.models[i].alphas) {
        for (const auto& sc : ex.noises) {
          try {
            ex.models[i].spec(a, sc.channel.inf_bound()).validate();
          } catch (const DomainError& e) {
            throw ConfigError(fmt::format("models[{}]: {} (noise '{}')", i, e.what(), sc.name));
          }
        }
      }
    }
    return ex;
  } catch (const YAML::Exception& e) {
    throw ConfigError(fmt::format("{}: {}", origin, e.what()));
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", origin, e.what()));
  } catch (const DomainError& e) {
    throw ConfigError(fmt::format("{}: {}", origin, e.what()));
  } catch (const DimensionMismatch& e) {
    throw ConfigError(fmt::format("{}: {}", origin, e.what()));
  }
}

Experiment load_experiment(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(fmt::format("cannot open config file {}", path.string()));
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_experiment(ss.str(), path.parent_path(), path.string());
}

TimeVariantQP build_problem(const Experiment& ex) {
  switch (ex.problem) {
    case ProblemKind::Builtin:
      return benchmark_problem();
    case ProblemKind::Static:
      return TimeVariantQP::constant(*ex.static_qp);
    case ProblemKind::Robot:
      break;
  }
  throw ConfigError("robot experiments have no standalone QP; use the track command");
}

std::string slug(const std::string& s) {
  std::string out;
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) || c == '-' || c == '.' || c == '_') out.push_back(static_cast<char>(std::tolower(u)));
    else if (!out.empty() && out.back() != '_') out.push_back('_');
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out.empty() ? "run" : out;
}

}  // namespace znnqp::app
