#include <cmath>

#include <gtest/gtest.h>

#include "prop.hpp"
#include "znnqp/errors.hpp"
#include "znnqp/oracle.hpp"
#include "znnqp/problems.hpp"
#include "znnqp/tvqp.hpp"

using namespace znnqp;
using znnqp::testing::for_all;
using znnqp::testing::Gen;

namespace {

QpData small_static() {
  QpData q;
  q.H = Mat::Identity(2, 2);
  q.rho = Vec::Zero(2);
  q.A = Mat{{1, 0}};
  q.b = Vec::Zero(1);
  q.C = Mat::Identity(2, 2);
  q.d = Vec{{1, 2}};
  return q;
}

Vec random_vec(Gen& g, Eigen::Index n, double r) {
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = g.uniform(-r, r);
  return v;
}

Vec eps_at(const TimeVariantQP& p, const Vec& y, double t) {
  return residual(p, KktState(p.dims(), y, t));
}

}  // namespace

TEST(FbPerturbed, Examples) {
  EXPECT_NEAR(fb_perturbed(Vec{{0.0}}, Vec{{0.0}}, 1e-16)[0], 0.0, 1e-7);
  EXPECT_NEAR(fb_perturbed(Vec{{1.0}}, Vec{{0.0}}, 1e-8)[0], -5.0e-9, 1e-15);
}

TEST(FbPerturbed, ComplementarityGrid) {
  for (double u : {0.0, 0.5, 1.0}) {
    for (double v : {0.0, 0.5, 1.0}) {
      const double f = fb_perturbed(Vec{{u}}, Vec{{v}}, 1e-12)[0];
      if (u == 0.0 || v == 0.0) {
        EXPECT_LE(std::abs(f), 1e-5) << u << "," << v;
      } else {
        EXPECT_GE(std::abs(f), 1e-2) << u << "," << v;
      }
    }
  }
}

TEST(FbPerturbed, Errors) {
  EXPECT_THROW(fb_perturbed(Vec::Zero(2), Vec::Zero(3), 1e-8), DimensionMismatch);
  EXPECT_THROW(fb_perturbed(Vec::Zero(2), Vec::Zero(2), 0.0), DomainError);
  EXPECT_THROW(fb_perturbed(Vec::Zero(2), Vec::Zero(2), -1.0), DomainError);
}

TEST(FbPerturbed, StrictlyBelowSum) {
  for_all(3, 500, [](Gen& g) {
    const Vec u = random_vec(g, 4, 3), v = random_vec(g, 4, 3);
    const Vec f = fb_perturbed(u, v, 1e-8);
    EXPECT_TRUE(f.allFinite());
    EXPECT_TRUE(((u + v) - f).minCoeff() > 0.0);
  });
}

TEST(KktState, Validation) {
  const QpDims d{2, 1, 2};
  EXPECT_THROW(KktState(d, Vec::Zero(4), 0.0), DimensionMismatch);
  EXPECT_THROW(KktState(d, Vec::Zero(5), 0.0, 0.0), DomainError);
  const KktState s(d, Vec{{1, 2, 3, 4, 5}}, 0.0);
  EXPECT_EQ(s.x(), (Vec{{1, 2}}));
  EXPECT_EQ(s.phi(), (Vec{{3}}));
  EXPECT_EQ(s.varphi(), (Vec{{4, 5}}));
}

TEST(Residual, ZeroStateExpansion) {
  const auto p = TimeVariantQP::constant(small_static());
  const Vec eps = eps_at(p, Vec::Zero(5), 0.0);
  EXPECT_EQ(eps.head(3).cwiseAbs().maxCoeff(), 0.0);
  const Vec d = small_static().d;
  for (int i = 0; i < 2; ++i) {
    EXPECT_DOUBLE_EQ(eps[3 + i], d[i] - std::sqrt(d[i] * d[i] + 1e-8));
    EXPECT_NEAR(eps[3 + i], -1e-8 / (2 * d[i]), 1e-15);
  }
}

TEST(Residual, OraclePointOfBenchmarkAtZero) {
  const auto p = benchmark_problem();
  const auto s = solve_at(p, 0.0);
  EXPECT_LE(eps_at(p, s.y(), 0.0).norm(), 1e-6);
}

TEST(Residual, TauOnlyTouchesComplementarityRows) {
  const auto p = benchmark_problem();
  for_all(4, 50, [&](Gen& g) {
    const Vec y = random_vec(g, 7, 2);
    const double t = g.uniform(0, 3);
    const Vec a = residual(p, KktState(p.dims(), y, t, 1e-8));
    const Vec b = residual(p, KktState(p.dims(), y, t, 2e-8));
    EXPECT_EQ(a.head(3), b.head(3));
  });
}

TEST(Residual, AffineInPrimalDualRows) {
  const auto p = benchmark_problem();
  for_all(5, 50, [&](Gen& g) {
    const Vec y1 = random_vec(g, 7, 2), y2 = random_vec(g, 7, 2);
    const double a = g.uniform(-1, 2), t = g.uniform(0, 3);
    const Vec mix = eps_at(p, a * y1 + (1 - a) * y2, t).head(3);
    const Vec comb = a * eps_at(p, y1, t).head(3) + (1 - a) * eps_at(p, y2, t).head(3);
    EXPECT_LE((mix - comb).cwiseAbs().maxCoeff(), 1e-12);
  });
}

TEST(Residual, DimensionMismatch) {
  const auto p = benchmark_problem();
  EXPECT_THROW(residual(p, KktState(QpDims{2, 1, 3}, Vec::Zero(6), 0.0)), DimensionMismatch);
}

TEST(AssembleBlocks, TimeInvariantHasNoRates) {
  const auto p = TimeVariantQP::constant(small_static());
  const auto b = assemble_blocks(p, KktState(p.dims(), Vec{{0.3, -0.2, 0.1, 0.5, 0.0}}, 1.0));
  EXPECT_EQ(b.N.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(b.sigma.cwiseAbs().maxCoeff(), 0.0);
}

TEST(AssembleBlocks, InactiveConstraintLimit) {
  QpData q = small_static();
  q.d = Vec{{1e3, 1e3}};
  const auto p = TimeVariantQP::constant(q);
  const auto b = assemble_blocks(p, KktState(p.dims(), Vec::Zero(5), 0.0));
  EXPECT_LE((b.pi1 - Vec::Ones(2)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE(b.M.block(3, 0, 2, 2).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE((b.M.block(3, 3, 2, 2) - Mat::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_FALSE(b.degenerate);
}

TEST(AssembleBlocks, PiBounds) {
  const auto p = benchmark_problem();
  for_all(6, 300, [&](Gen& g) {
    Vec y = random_vec(g, 7, 3);
    const double t = g.uniform(0, 3);
    const auto b = assemble_blocks(p, KktState(p.dims(), y, t));
    EXPECT_LE(b.pi1.cwiseAbs().maxCoeff(), 1 + 1e-12);
    EXPECT_LE(b.pi2.cwiseAbs().maxCoeff(), 1 + 1e-12);
    EXPECT_GE(b.n_vec.minCoeff(), std::sqrt(1e-8));
    for (int i = 0; i < 4; ++i) {
      if (b.m_vec[i] >= 0 && y[3 + i] >= 0) {
        EXPECT_LE(b.pi1[i] * b.pi1[i] + b.pi2[i] * b.pi2[i], 1 + 1e-9);
      }
    }
  });
}

TEST(AssembleBlocks, ResidualMatchesPq) {
  const auto p = benchmark_problem();
  for_all(7, 50, [&](Gen& g) {
    const Vec y = random_vec(g, 7, 2);
    const double t = g.uniform(0, 3);
    const KktState s(p.dims(), y, t);
    const auto b = assemble_blocks(p, s);
    EXPECT_LE((b.P * y + b.q - residual(p, s)).cwiseAbs().maxCoeff(), 1e-14);
  });
}

TEST(AssembleBlocks, TimeDerivativeAlongOraclePath) {
  const auto p = benchmark_problem();
  const double t = 0.3, h = 1e-5;
  const Vec y = solve_at(p, t).y();
  const Vec ydot = (solve_at(p, t + h).y() - solve_at(p, t - h).y()) / (2 * h);
  const auto b = assemble_blocks(p, KktState(p.dims(), y, t));
  const Vec predicted = b.M * ydot + b.N * y + b.sigma;
  const Vec fd = (eps_at(p, solve_at(p, t + h).y(), t + h) - eps_at(p, solve_at(p, t - h).y(), t - h)) / (2 * h);
  EXPECT_LE((predicted - fd).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(AssembleBlocks, FullDerivativeOnRandomPaths) {
  const auto p = benchmark_problem();
  for_all(8, 40, [&](Gen& g) {
    const Vec y0 = random_vec(g, 7, 1.5), v = random_vec(g, 7, 1), w = random_vec(g, 7, 1);
    const double om = g.uniform(0.5, 3), t = g.uniform(0.1, 2.9), h = 1e-6;
    auto path = [&](double s) -> Vec { return y0 + s * v + std::sin(om * s) * w; };
    const Vec ydot = v + om * std::cos(om * t) * w;
    const auto b = assemble_blocks(p, KktState(p.dims(), path(t), t));
    const Vec predicted = b.M * ydot + b.N * path(t) + b.sigma;
    const Vec fd = (eps_at(p, path(t + h), t + h) - eps_at(p, path(t - h), t - h)) / (2 * h);
    EXPECT_LE((predicted - fd).cwiseAbs().maxCoeff(), 1e-4);
  });
}

TEST(PartialTimeResidual, MatchesFiniteDifferenceAtFixedState) {
  const auto p = benchmark_problem();
  const double t = 0.3, h = 1e-6;
  const Vec y = solve_at(p, t).y();
  const auto b = assemble_blocks(p, KktState(p.dims(), y, t));
  const Vec fd = (eps_at(p, y, t + h) - eps_at(p, y, t - h)) / (2 * h);
  EXPECT_LE((partial_time_residual(b, y) - fd).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(PartialTimeResidual, TimeInvariantAndAffine) {
  const auto ps = TimeVariantQP::constant(small_static());
  const Vec ys{{0.1, 0.2, 0.3, 0.4, 0.5}};
  const auto bs = assemble_blocks(ps, KktState(ps.dims(), ys, 0.0));
  EXPECT_EQ(partial_time_residual(bs, ys).cwiseAbs().maxCoeff(), 0.0);

  const auto p = benchmark_problem();
  const Vec y = Vec::LinSpaced(7, -1, 1);
  const auto b = assemble_blocks(p, KktState(p.dims(), y, 0.7));
  EXPECT_LE((partial_time_residual(b, 2 * y) - (b.N * (2 * y) + b.sigma)).norm(), 1e-14);
  EXPECT_THROW(partial_time_residual(b, Vec::Zero(3)), DimensionMismatch);
}

TEST(TimeVariantQP, FiniteDifferenceRatesMatchAnalytic) {
  const auto exact = benchmark_problem();
  const auto fd = TimeVariantQP::with_fd_rates(exact.dims(), [&](double t) { return exact.sample(t).value; });
  for (double t : {0.0, 0.4, 1.7}) {
    const auto a = exact.sample(t).rate, b = fd.sample(t).rate;
    EXPECT_LE((a.H - b.H).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LE((a.rho - b.rho).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LE((a.A - b.A).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LE((a.b - b.b).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(TimeVariantQP, SamplerShapeIsChecked) {
  const TimeVariantQP bad(QpDims{2, 1, 1}, [](double t) {
    QpSample s;
    s.t = t;
    s.value = QpData::zeros(QpDims{2, 1, 2});
    s.rate = s.value;
    return s;
  });
  EXPECT_THROW(bad.sample(0.0), DimensionMismatch);
}

TEST(TimeVariantQP, BenchmarkHessianIsPositiveDefinite) {
  const auto p = benchmark_problem();
  for (double t = 0; t <= 3; t += 0.05) EXPECT_GT(min_eigenvalue(p.sample(t).value.H), 0.0);
}
