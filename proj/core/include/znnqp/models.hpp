#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "znnqp/tvqp.hpp"

namespace znnqp {

enum class ModelKind {
  GNN,
  ZNN,
  FO_GNN,
  PRAGNN,
  SPTC_NT_ZNN,
  NIFZNN,
  PTC_FOZNN,
  SPTC_AN_FOZNN,
};

std::string_view to_string(ModelKind kind) noexcept;
std::optional<ModelKind> parse_model_kind(std::string_view name) noexcept;

/// True for models integrated through M(t) ydot = ... (a linear solve per step).
bool uses_kkt_solve(ModelKind kind) noexcept;

/// Solver model and its parameters. Fields a model does not use are ignored.
struct ModelSpec {
  ModelKind kind = ModelKind::SPTC_AN_FOZNN;
  double gamma = 2.0;     ///< gain
  double alpha = 0.5;     ///< fractional order, (0, 1]
  double t_c = 1.0;       ///< predefined time [s]
  double zeta = 1e-3;     ///< switching gain, must exceed Delta
  double Delta = 0.0;     ///< assumed noise sup-norm bound
  double p_exp = 0.5;     ///< SPTC-NT-ZNN power
  double kappa = 0.5;     ///< PTC-FOZNN exponent
  double gamma2 = 0.0;    ///< PRAGNN linear gain
  double gamma3 = 1e-3;   ///< PRAGNN normalized gain
  double xi = 5e-4;       ///< SPTC-NT-ZNN switching gain
  double fo_eps = 1e-6;   ///< FO-GNN regularizer inside |y_i - y_{i-1} + eps|
  std::optional<double> pragnn_k;  ///< PRAGNN k(t); gamma when unset
  /// Clamp the state-proportional part of the decay gain at 1/dt.
  bool euler_gain_cap = true;

  /// Throws DomainError naming the first invalid field.
  void validate() const;
  std::string label() const;
};

/// Parameter set of the benchmark study for a given noise bound:
/// gamma = 2, t_c = 1, p = 0.5, kappa = 0.5, Delta = noise_bound,
/// zeta = 5 Delta (1e-3 when Delta = 0), gamma2 = 0, gamma3 = zeta, xi = zeta / gamma.
ModelSpec benchmark_preset(ModelKind kind, double noise_bound, double alpha = 0.5);

/// t_p = (1 - exp(-pi / (2 sqrt(zeta (zeta - Delta))))) t_c.
/// Throws DomainError unless zeta > Delta >= 0 and t_c > 0.
double t_p_of(double zeta, double Delta, double t_c);

/// Piecewise predefined-time stabilizer of SPTC-AN-FOZNN, exact formula.
/// Returns 0 at x = 0. t >= t_c selects the second branch.
Vec sptc_an_activation(const Vec& x, double t, const ModelSpec& spec);

/// Same with the denominators (t_c - t) and (t - t_p) floored at `floor_step`.
Vec sptc_an_activation(const Vec& x, double t, const ModelSpec& spec, double floor_step);

/// Residual decay command gamma(t) * Phi(eps) of a ZNN-family model, i.e. the
/// term subtracted on the right of M ydot = -N y - sigma - gamma(t) Phi(eps).
/// Denominators are floored at dt; with euler_gain_cap the state-proportional
/// part of the gain is limited to 1/dt while sign-type terms pass unchanged.
Vec decay_command(const ModelSpec& spec, const Vec& eps, double t, double dt);

struct RhsContext {
  double dt = 1e-3;
  /// Previous accepted state, FO-GNN only. nullptr means "same as y".
  const Vec* y_prev = nullptr;
};

struct RhsResult {
  Vec ydot;
  /// The linear solve fell back to least squares, or a normalization
  /// ||M' eps|| < 1e-14 was skipped.
  bool degenerate = false;
};

/// ydot for the selected model. eps must equal residual(problem, state).
RhsResult rhs(const ModelSpec& model, const KktBlocks& blocks, const Vec& eps, const Vec& y,
              double t, const Vec& delta, const RhsContext& ctx);

inline constexpr double kNormalizationFloor = 1e-14;

}  // namespace znnqp
