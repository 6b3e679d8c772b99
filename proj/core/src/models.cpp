#include "znnqp/models.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numbers>
#include <utility>

#include <fmt/format.h>

#include "znnqp/errors.hpp"

namespace znnqp {

namespace {

constexpr std::array<std::pair<ModelKind, std::string_view>, 8> kNames{{
    {ModelKind::GNN, "GNN"},
    {ModelKind::ZNN, "ZNN"},
    {ModelKind::FO_GNN, "FO-GNN"},
    {ModelKind::PRAGNN, "PRAGNN"},
    {ModelKind::SPTC_NT_ZNN, "SPTC-NT-ZNN"},
    {ModelKind::NIFZNN, "NIFZNN"},
    {ModelKind::PTC_FOZNN, "PTC-FOZNN"},
    {ModelKind::SPTC_AN_FOZNN, "SPTC-AN-FOZNN"},
}};

std::string normalize(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '-' || c == '_' || c == ' ') continue;
    out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return out;
}

// State-proportional and sign-type parts of a scalar decay law
// gamma(t) Phi(x) = smooth * x + switching * x / ||x||.
struct ScalarGain {
  double smooth = 0.0;
  double switching = 0.0;
};

double floored(double v, double floor_step) { return floor_step > 0.0 ? std::max(v, floor_step) : v; }

ScalarGain sptc_an_gain(double norm, double t, const ModelSpec& s, double floor_step) {
  const double tp = t_p_of(s.zeta, s.Delta, s.t_c);
  if (t < s.t_c) {
    const double gap = floored(s.t_c - t, floor_step);
    const double ratio = std::pow(t / s.t_c, s.alpha - 1.0);
    return {ratio * (1.0 / gap + s.gamma * norm / (gap * gap)), 0.0};
  }
  const double gap = floored(t - tp, floor_step);
  const double gain_t = s.gamma * std::pow(t, s.alpha - 1.0);
  return {-1.0 / gap + gain_t * norm / (gap * gap), s.zeta};
}

ScalarGain ptc_fo_gain(double norm, double t, const ModelSpec& s) {
  // gamma t^(a-1) * pi/(2 kappa gamma t_c^a) * (|x|^(1-k) + |x|^(1+k)) / |x|
  const double scale =
      std::pow(t, s.alpha - 1.0) * std::numbers::pi / (2.0 * s.kappa * std::pow(s.t_c, s.alpha));
  return {scale * (std::pow(norm, -s.kappa) + std::pow(norm, s.kappa)), 0.0};
}

double cap(double gain, const ModelSpec& s, double dt) {
  return (s.euler_gain_cap && dt > 0.0) ? std::min(gain, 1.0 / dt) : gain;
}

Vec apply_scalar(const Vec& x, double norm, ScalarGain g) {
  if (norm == 0.0) return Vec::Zero(x.size());
  return (g.smooth + g.switching / norm) * x;
}

Vec sptc_nt_decay(const ModelSpec& s, const Vec& eps, double t, double dt) {
  Vec out = Vec::Zero(eps.size());
  if (t < s.t_c) {
    const double gain = cap(s.gamma / floored(s.t_c - t, dt), s, dt);
    return gain * eps;
  }
  for (Eigen::Index i = 0; i < eps.size(); ++i) {
    const double a = std::abs(eps[i]);
    if (a == 0.0) continue;
    const double sgn = eps[i] > 0 ? 1.0 : -1.0;
    const double smooth = cap(s.gamma * (1.0 + std::pow(a, s.p_exp - 1.0)), s, dt);
    out[i] = smooth * eps[i] + s.gamma * s.xi * sgn;
  }
  return out;
}

}  // namespace

std::string_view to_string(ModelKind kind) noexcept {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) noexcept {
  const std::string key = normalize(name);
  for (const auto& [k, n] : kNames) {
    if (normalize(n) == key) return k;
  }
  return std::nullopt;
}

bool uses_kkt_solve(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::ZNN:
    case ModelKind::SPTC_NT_ZNN:
    case ModelKind::PTC_FOZNN:
    case ModelKind::SPTC_AN_FOZNN:
      return true;
    default:
      return false;
  }
}

void ModelSpec::validate() const {
  auto fail = [](const char* field, const char* rule, double v) {
    throw DomainError(fmt::format("model parameter {} = {} violates {}", field, v, rule));
  };
  if (!(gamma > 0)) fail("gamma", "gamma > 0", gamma);
  if (!(alpha > 0 && alpha <= 1)) fail("alpha", "0 < alpha <= 1", alpha);
  if (!(t_c > 0)) fail("t_c", "t_c > 0", t_c);
  if (!(Delta >= 0)) fail("Delta", "Delta >= 0", Delta);
  if (!(zeta > Delta)) fail("zeta", "zeta > Delta", zeta);
  if (!(p_exp > 0 && p_exp < 1)) fail("p_exp", "0 < p < 1", p_exp);
  if (!(kappa > 0 && kappa < 1)) fail("kappa", "0 < kappa < 1", kappa);
  if (!(gamma2 >= 0)) fail("gamma2", "gamma2 >= 0", gamma2);
  if (!(gamma3 >= 0)) fail("gamma3", "gamma3 >= 0", gamma3);
  if (!(xi >= 0)) fail("xi", "xi >= 0", xi);
  if (!(fo_eps > 0)) fail("fo_eps", "fo_eps > 0", fo_eps);
  if (pragnn_k && !(*pragnn_k >= 0)) fail("pragnn_k", "k >= 0", *pragnn_k);
}

std::string ModelSpec::label() const {
  switch (kind) {
    case ModelKind::FO_GNN:
    case ModelKind::PTC_FOZNN:
    case ModelKind::SPTC_AN_FOZNN:
      return fmt::format("{}(a={})", to_string(kind), alpha);
    default:
      return std::string(to_string(kind));
  }
}

ModelSpec benchmark_preset(ModelKind kind, double noise_bound, double alpha) {
  ModelSpec s;
  s.kind = kind;
  s.gamma = 2.0;
  s.t_c = 1.0;
  s.alpha = alpha;
  s.p_exp = 0.5;
  s.kappa = 0.5;
  s.Delta = noise_bound;
  s.zeta = noise_bound > 0 ? 5.0 * noise_bound : 1e-3;
  s.gamma2 = 0.0;
  s.gamma3 = s.zeta;
  s.xi = s.zeta / s.gamma;
  return s;
}

double t_p_of(double zeta, double Delta, double t_c) {
  if (!(Delta >= 0) || !(zeta > Delta)) {
    throw DomainError(fmt::format("t_p requires zeta > Delta >= 0 (zeta = {}, Delta = {})", zeta, Delta));
  }
  if (!(t_c > 0)) throw DomainError("t_p requires t_c > 0");
  return -std::expm1(-std::numbers::pi / (2.0 * std::sqrt(zeta * (zeta - Delta)))) * t_c;
}

Vec sptc_an_activation(const Vec& x, double t, const ModelSpec& spec) {
  return sptc_an_activation(x, t, spec, 0.0);
}

Vec sptc_an_activation(const Vec& x, double t, const ModelSpec& spec, double floor_step) {
  const double norm = x.norm();
  if (norm == 0.0) return Vec::Zero(x.size());
  if (t < spec.t_c) {
    const double gap = floored(spec.t_c - t, floor_step);
    const double pre = 1.0 / (spec.gamma * std::pow(spec.t_c, spec.alpha - 1.0));
    return pre * (1.0 / gap + spec.gamma * norm / (gap * gap)) * x;
  }
  const double gap = floored(t - t_p_of(spec.zeta, spec.Delta, spec.t_c), floor_step);
  const double gain_t = spec.gamma * std::pow(t, spec.alpha - 1.0);
  return ((-1.0 / gap + gain_t * norm / (gap * gap)) * x + (spec.zeta / norm) * x) / gain_t;
}

Vec decay_command(const ModelSpec& s, const Vec& eps, double t, double dt) {
  const double norm = eps.norm();
  switch (s.kind) {
    case ModelKind::ZNN:
      return cap(s.gamma, s, dt) * eps;
    case ModelKind::SPTC_NT_ZNN:
      return sptc_nt_decay(s, eps, t, dt);
    case ModelKind::PTC_FOZNN: {
      if (norm == 0.0) return Vec::Zero(eps.size());
      ScalarGain g = ptc_fo_gain(norm, t, s);
      g.smooth = cap(g.smooth, s, dt);
      return apply_scalar(eps, norm, g);
    }
    case ModelKind::SPTC_AN_FOZNN: {
      if (norm == 0.0) return Vec::Zero(eps.size());
      ScalarGain g = sptc_an_gain(norm, t, s, dt);
      g.smooth = cap(g.smooth, s, dt);
      return apply_scalar(eps, norm, g);
    }
    default:
      throw DomainError(fmt::format("{} has no residual decay law", to_string(s.kind)));
  }
}

RhsResult rhs(const ModelSpec& model, const KktBlocks& blocks, const Vec& eps, const Vec& y,
              double t, const Vec& delta, const RhsContext& ctx) {
  const Eigen::Index k = y.size();
  if (eps.size() != k || delta.size() != k || blocks.M.rows() != k || blocks.M.cols() != k) {
    throw DimensionMismatch(
        fmt::format("rhs: eps ({}), y ({}), delta ({}) and M ({}x{}) disagree", eps.size(), k,
                    delta.size(), blocks.M.rows(), blocks.M.cols()));
  }

  RhsResult out;
  if (uses_kkt_solve(model.kind)) {
    const Vec r = -blocks.N * y - blocks.sigma - decay_command(model, eps, t, ctx.dt) + delta;
    SolveResult sol = solve_square(blocks.M, r);
    out.ydot = std::move(sol.x);
    out.degenerate = sol.degenerate;
    return out;
  }

  const Vec grad = blocks.M.transpose() * eps;
  switch (model.kind) {
    case ModelKind::GNN:
      out.ydot = -model.gamma * grad + delta;
      break;
    case ModelKind::FO_GNN: {
      const Vec& prev = ctx.y_prev ? *ctx.y_prev : y;
      if (prev.size() != k) throw DimensionMismatch("rhs: FO-GNN previous state has wrong length");
      const Vec base = (y - prev).array() + model.fo_eps;
      const Vec weight = base.array().abs().pow(1.0 - model.alpha);
      out.ydot = -(model.gamma / gamma_fn(2.0 - model.alpha)) * grad.cwiseProduct(weight) + delta;
      break;
    }
    case ModelKind::PRAGNN: {
      const double kt = model.pragnn_k.value_or(model.gamma);
      const double gnorm = grad.norm();
      out.ydot = -(kt + model.gamma2) * grad + delta;
      if (gnorm < kNormalizationFloor) {
        out.degenerate = true;
      } else {
        out.ydot -= model.gamma3 * grad / gnorm;
      }
      break;
    }
    case ModelKind::NIFZNN: {
      const double g2 = grad.squaredNorm();
      out.ydot = delta;
      if (std::sqrt(g2) < kNormalizationFloor) {
        out.degenerate = true;
      } else {
        const double drive =
            eps.dot(partial_time_residual(blocks, y)) + 0.5 * model.gamma * eps.squaredNorm();
        out.ydot -= (drive / g2) * grad;
      }
      break;
    }
    default:
      break;
  }
  return out;
}

}  // namespace znnqp
