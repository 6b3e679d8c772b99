#include "znnqp/tvqp.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "znnqp/errors.hpp"

namespace znnqp {

namespace {

void expect_shape(const char* what, Eigen::Index rows, Eigen::Index cols, Eigen::Index want_rows,
                  Eigen::Index want_cols) {
  if (rows != want_rows || cols != want_cols) {
    throw DimensionMismatch(std::string("QP block ") + what + " is " + std::to_string(rows) + "x" +
                            std::to_string(cols) + ", expected " + std::to_string(want_rows) +
                            "x" + std::to_string(want_cols));
  }
}

QpData combine(const QpData& a, const QpData& b, double wa, double wb) {
  return {wa * a.H + wb * b.H, wa * a.rho + wb * b.rho, wa * a.A + wb * b.A,
          wa * a.b + wb * b.b, wa * a.C + wb * b.C,   wa * a.d + wb * b.d};
}

void check_state(const QpDims& dims, const KktState& state) {
  if (state.dims != dims || state.y.size() != dims.total()) {
    throw DimensionMismatch("KKT state of size " + std::to_string(state.y.size()) +
                            " does not match problem with n+m+p = " +
                            std::to_string(dims.total()));
  }
}

}  // namespace

void QpData::check(const QpDims& e) const {
  expect_shape("H", H.rows(), H.cols(), e.n, e.n);
  expect_shape("rho", rho.rows(), 1, e.n, 1);
  expect_shape("A", A.rows(), A.cols(), e.m, e.n);
  expect_shape("b", b.rows(), 1, e.m, 1);
  expect_shape("C", C.rows(), C.cols(), e.p, e.n);
  expect_shape("d", d.rows(), 1, e.p, 1);
}

QpData QpData::zeros(const QpDims& e) {
  return {Mat::Zero(e.n, e.n), Vec::Zero(e.n), Mat::Zero(e.m, e.n),
          Vec::Zero(e.m),      Mat::Zero(e.p, e.n), Vec::Zero(e.p)};
}

TimeVariantQP::TimeVariantQP(QpDims dims, Sampler sampler)
    : dims_(dims), sampler_(std::move(sampler)) {}

TimeVariantQP TimeVariantQP::with_fd_rates(QpDims dims, ValueSampler values) {
  return TimeVariantQP(dims, [values = std::move(values)](double t) {
    constexpr double h = 1e-6;
    QpSample s;
    s.t = t;
    s.value = values(t);
    s.rate = combine(values(t + h), values(t - h), 0.5 / h, -0.5 / h);
    return s;
  });
}

TimeVariantQP TimeVariantQP::constant(QpData data) {
  const QpDims dims = data.dims();
  data.check(dims);
  return TimeVariantQP(dims, [data = std::move(data)](double t) {
    return QpSample{t, data, QpData::zeros(data.dims())};
  });
}

QpSample TimeVariantQP::sample(double t) const {
  QpSample s = sampler_(t);
  s.t = t;
  s.value.check(dims_);
  s.rate.check(dims_);
  return s;
}

double min_eigenvalue(const Mat& H) {
  if (H.size() == 0) return 0.0;
  const Mat sym = 0.5 * (H + H.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

KktState::KktState(QpDims d, Vec yy, double tt, double ttau)
    : dims(d), y(std::move(yy)), t(tt), tau(ttau) {
  if (y.size() != dims.total()) {
    throw DimensionMismatch("KKT state length " + std::to_string(y.size()) +
                            " != n+m+p = " + std::to_string(dims.total()));
  }
  if (!(tau > 0.0)) throw DomainError("FB perturbation tau must be positive");
}

Vec fb_perturbed(const Vec& u, const Vec& v, double tau) {
  if (u.size() != v.size()) throw DimensionMismatch("fb_perturbed: u and v differ in length");
  if (!(tau > 0.0)) throw DomainError("fb_perturbed: tau must be positive");
  return (u + v).array() - (u.array().square() + v.array().square() + tau).sqrt();
}

namespace {

struct FbTerms {
  Vec m_vec;
  Vec n_vec;
  bool degenerate = false;
};

FbTerms fb_terms(const QpData& v, const KktState& s) {
  FbTerms f;
  const double floor = std::sqrt(s.tau);
  f.m_vec = v.d - v.C * s.x();
  f.n_vec = (f.m_vec.array().square() + s.varphi().array().square() + s.tau).sqrt();
  for (Eigen::Index i = 0; i < f.n_vec.size(); ++i) {
    if (!(f.n_vec[i] >= floor * (1.0 - 1e-9))) f.degenerate = true;
    if (!(f.n_vec[i] >= floor)) f.n_vec[i] = floor;
  }
  return f;
}

}  // namespace

Vec residual(const QpSample& sample, const KktState& state) {
  const QpData& v = sample.value;
  const QpDims dims = state.dims;
  v.check(dims);
  check_state(dims, state);
  const auto [m_vec, n_vec, degenerate] = fb_terms(v, state);
  (void)m_vec;
  (void)degenerate;

  Vec eps(dims.total());
  const auto x = state.x();
  const auto phi = state.phi();
  const auto varphi = state.varphi();
  eps.head(dims.n) = v.H * x + v.A.transpose() * phi + v.C.transpose() * varphi + v.rho;
  eps.segment(dims.n, dims.m) = v.A * x - v.b;
  eps.tail(dims.p) = -v.C * x + varphi + v.d - n_vec;
  return eps;
}

Vec residual(const TimeVariantQP& problem, const KktState& state) {
  check_state(problem.dims(), state);
  return residual(problem.sample(state.t), state);
}

KktBlocks assemble_blocks(const QpSample& sample, const KktState& state) {
  const QpData& v = sample.value;
  const QpData& r = sample.rate;
  const QpDims dims = state.dims;
  v.check(dims);
  r.check(dims);
  check_state(dims, state);

  const Eigen::Index n = dims.n, m = dims.m, p = dims.p, k = dims.total();
  auto fb = fb_terms(v, state);

  KktBlocks b;
  b.m_vec = std::move(fb.m_vec);
  b.n_vec = std::move(fb.n_vec);
  b.degenerate = fb.degenerate;
  b.pi1 = b.m_vec.cwiseQuotient(b.n_vec);
  b.pi2 = state.varphi().cwiseQuotient(b.n_vec);

  b.P = Mat::Zero(k, k);
  b.P.block(0, 0, n, n) = v.H;
  b.P.block(0, n, n, m) = v.A.transpose();
  b.P.block(0, n + m, n, p) = v.C.transpose();
  b.P.block(n, 0, m, n) = v.A;
  b.P.block(n + m, 0, p, n) = -v.C;
  b.P.block(n + m, n + m, p, p).setIdentity();

  b.q.resize(k);
  b.q << v.rho, -v.b, v.d - b.n_vec;

  const Vec one_minus_pi1 = Vec::Ones(p) - b.pi1;

  b.M = Mat::Zero(k, k);
  b.M.block(0, 0, n + m, k) = b.P.block(0, 0, n + m, k);
  b.M.block(n + m, 0, p, n) = -(one_minus_pi1.asDiagonal() * v.C);
  b.M.block(n + m, n + m, p, p) = (Vec::Ones(p) - b.pi2).asDiagonal();

  b.N = Mat::Zero(k, k);
  b.N.block(0, 0, n, n) = r.H;
  b.N.block(0, n, n, m) = r.A.transpose();
  b.N.block(0, n + m, n, p) = r.C.transpose();
  b.N.block(n, 0, m, n) = r.A;
  b.N.block(n + m, 0, p, n) = -(one_minus_pi1.asDiagonal() * r.C);

  b.sigma.resize(k);
  b.sigma << r.rho, -r.b, one_minus_pi1.cwiseProduct(r.d);
  return b;
}

KktBlocks assemble_blocks(const TimeVariantQP& problem, const KktState& state) {
  check_state(problem.dims(), state);
  return assemble_blocks(problem.sample(state.t), state);
}

Vec partial_time_residual(const KktBlocks& blocks, const Vec& y) {
  if (blocks.N.cols() != y.size() || blocks.sigma.size() != blocks.N.rows()) {
    throw DimensionMismatch("partial_time_residual: N, sigma and y disagree in size");
  }
  return blocks.N * y + blocks.sigma;
}

}  // namespace znnqp
