#pragma once

#include <functional>

#include "znnqp/numkit.hpp"

namespace znnqp {

/// Decision-variable, equality and inequality counts of a QP.
struct QpDims {
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  Eigen::Index p = 0;

  Eigen::Index total() const noexcept { return n + m + p; }
  bool operator==(const QpDims&) const = default;
};

/// Coefficients of  min x'Hx/2 + rho'x  s.t.  Ax = b, Cx <= d  at one instant.
/// The same layout carries their time derivatives.
struct QpData {
  Mat H;
  Vec rho;
  Mat A;
  Vec b;
  Mat C;
  Vec d;

  QpDims dims() const noexcept { return {H.rows(), A.rows(), C.rows()}; }
  /// Throws DimensionMismatch if the blocks disagree with `expected`.
  void check(const QpDims& expected) const;
  static QpData zeros(const QpDims& dims);
};

/// Problem data and its time derivative at time t.
struct QpSample {
  double t = 0.0;
  QpData value;
  QpData rate;
};

/// A time-variant QP given by a re-entrant sampler t -> (data, d/dt data).
class TimeVariantQP {
 public:
  using Sampler = std::function<QpSample(double)>;
  using ValueSampler = std::function<QpData(double)>;

  TimeVariantQP(QpDims dims, Sampler sampler);

  /// Wraps a sampler that cannot supply derivatives; rates come from central
  /// differences with h = 1e-6.
  static TimeVariantQP with_fd_rates(QpDims dims, ValueSampler values);

  /// Time-invariant problem; every rate is zero.
  static TimeVariantQP constant(QpData data);

  const QpDims& dims() const noexcept { return dims_; }
  QpSample sample(double t) const;

 private:
  QpDims dims_;
  Sampler sampler_;
};

/// Smallest eigenvalue of the symmetric part of H. Used as an advisory PSD
/// diagnostic; H(t) >= -1e-9 is expected but not enforced.
double min_eigenvalue(const Mat& H);

/// Augmented primal-dual state y = [x; phi; varphi] at time t.
struct KktState {
  QpDims dims;
  Vec y;
  double t = 0.0;
  double tau = 1e-8;

  KktState() = default;
  /// Throws DimensionMismatch if y.size() != n+m+p, DomainError if tau <= 0.
  KktState(QpDims dims, Vec y, double t, double tau = 1e-8);

  auto x() const { return y.head(dims.n); }
  auto phi() const { return y.segment(dims.n, dims.m); }
  auto varphi() const { return y.tail(dims.p); }
};

struct KktBlocks {
  Mat P;
  Vec q;
  Mat M;
  Mat N;
  Vec sigma;
  Vec pi1;
  Vec pi2;
  Vec m_vec;
  Vec n_vec;
  /// Set when n(t) had to be floored at sqrt(tau) beyond round-off.
  bool degenerate = false;
};

/// Element-wise perturbed Fischer-Burmeister function u + v - sqrt(u.u + v.v + tau).
Vec fb_perturbed(const Vec& u, const Vec& v, double tau);

/// eps(t) = P(t) y + q(t).
Vec residual(const QpSample& sample, const KktState& state);
Vec residual(const TimeVariantQP& problem, const KktState& state);

/// Builds P, q, M, N, sigma and the FB scalings at the state's time.
KktBlocks assemble_blocks(const QpSample& sample, const KktState& state);
KktBlocks assemble_blocks(const TimeVariantQP& problem, const KktState& state);

/// Explicit time partial of f(y, t) at fixed y: N y + sigma.
Vec partial_time_residual(const KktBlocks& blocks, const Vec& y);

}  // namespace znnqp
