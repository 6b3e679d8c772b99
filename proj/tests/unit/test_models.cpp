#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "prop.hpp"
#include "znnqp/errors.hpp"
#include "znnqp/integrator.hpp"
#include "znnqp/models.hpp"
#include "znnqp/oracle.hpp"
#include "znnqp/problems.hpp"

using namespace znnqp;
using znnqp::testing::for_all;
using znnqp::testing::Gen;

namespace {

constexpr ModelKind kAll[] = {ModelKind::GNN,         ModelKind::ZNN,    ModelKind::FO_GNN,
                              ModelKind::PRAGNN,      ModelKind::SPTC_NT_ZNN, ModelKind::NIFZNN,
                              ModelKind::PTC_FOZNN,   ModelKind::SPTC_AN_FOZNN};

ModelSpec an_spec(double alpha = 0.5) { return benchmark_preset(ModelKind::SPTC_AN_FOZNN, 0.0, alpha); }

QpData static_qp() {
  QpData q;
  q.H = Mat{{2, 0.5}, {0.5, 1}};
  q.rho = Vec{{1, -1}};
  q.A = Mat{{1, 1}};
  q.b = Vec{{0.2}};
  q.C = Mat{{1, 0}, {0, 1}, {-1, 0}};
  q.d = Vec{{1, 1, 1}};
  return q;
}

}  // namespace

TEST(ModelKind, NamesRoundTrip) {
  for (auto k : kAll) {
    EXPECT_EQ(parse_model_kind(to_string(k)), k);
  }
  EXPECT_EQ(parse_model_kind("sptc_an_foznn"), ModelKind::SPTC_AN_FOZNN);
  EXPECT_FALSE(parse_model_kind("LSTM").has_value());
}

TEST(ModelSpec, ValidateRejectsEachInvariant) {
  auto bad = [](auto mutate) {
    ModelSpec s;
    mutate(s);
    return s;
  };
  EXPECT_NO_THROW(ModelSpec{}.validate());
  EXPECT_THROW(bad([](ModelSpec& s) { s.gamma = 0; }).validate(), DomainError);
  EXPECT_THROW(bad([](ModelSpec& s) { s.alpha = 0; }).validate(), DomainError);
  EXPECT_THROW(bad([](ModelSpec& s) { s.alpha = 1.2; }).validate(), DomainError);
  EXPECT_THROW(bad([](ModelSpec& s) { s.t_c = -1; }).validate(), DomainError);
  EXPECT_THROW(bad([](ModelSpec& s) { s.zeta = s.Delta; }).validate(), DomainError);
  EXPECT_THROW(bad([](ModelSpec& s) { s.p_exp = 1; }).validate(), DomainError);
  EXPECT_THROW(bad([](ModelSpec& s) { s.kappa = 0; }).validate(), DomainError);
  EXPECT_THROW(bad([](ModelSpec& s) { s.fo_eps = 0; }).validate(), DomainError);
}

TEST(ModelSpec, BenchmarkPreset) {
  const auto s = benchmark_preset(ModelKind::SPTC_NT_ZNN, 0.5);
  EXPECT_EQ(s.gamma, 2.0);
  EXPECT_EQ(s.t_c, 1.0);
  EXPECT_EQ(s.p_exp, 0.5);
  EXPECT_EQ(s.kappa, 0.5);
  EXPECT_EQ(s.Delta, 0.5);
  EXPECT_EQ(s.zeta, 2.5);
  EXPECT_EQ(s.gamma2, 0.0);
  EXPECT_EQ(s.gamma3, 2.5);
  EXPECT_EQ(s.xi, 1.25);
  EXPECT_EQ(benchmark_preset(ModelKind::PRAGNN, 0.0).zeta, 1e-3);
}

TEST(TpOf, Examples) {
  EXPECT_NEAR(t_p_of(std::numbers::pi / 2, 0.0, 1.0), 1 - std::exp(-1.0), 1e-15);
  EXPECT_NEAR(t_p_of(std::numbers::pi / 2, 0.0, 2.0), 2 * 0.63212055882855767, 1e-12);
  EXPECT_NEAR(t_p_of(5.0, 1.0, 1.0), -std::expm1(-std::numbers::pi / (2 * std::sqrt(20.0))), 1e-15);
  EXPECT_NEAR(t_p_of(5.0, 1.0, 1.0), 0.2961857, 1e-7);
  EXPECT_LT(t_p_of(1e6, 0.0, 1.0), 1e-5);
  EXPECT_GT(t_p_of(1e6, 0.0, 1.0), 0.0);
  EXPECT_THROW(t_p_of(1.0, 1.0, 1.0), DomainError);
  EXPECT_THROW(t_p_of(0.5, 1.0, 1.0), DomainError);
  EXPECT_THROW(t_p_of(1.0, 0.0, 0.0), DomainError);
}

TEST(TpOf, StrictlyInsideWindow) {
  for_all(31, 200, [](Gen& g) {
    const double delta = g.uniform(0, 2), zeta = delta + g.uniform(0.05, 5), tc = g.uniform(0.01, 3);
    const double tp = t_p_of(zeta, delta, tc);
    EXPECT_GT(tp, 0.0);
    EXPECT_LT(tp, tc);
  });
}

TEST(SptcAnActivation, ZeroAtOrigin) {
  for (double t : {0.1, 1.0, 2.0}) EXPECT_EQ(sptc_an_activation(Vec::Zero(3), t, an_spec()).norm(), 0.0);
}

TEST(SptcAnActivation, HandEvaluatedScalar) {
  const Vec out = sptc_an_activation(Vec{{0.5}}, 0.5, an_spec(0.5));
  EXPECT_NEAR(out[0], 1.5, 1e-14);
}

TEST(SptcAnActivation, IntegerOrderReduction) {
  const auto s = an_spec(1.0);
  const Vec x{{0.3, -0.4}};
  const double t = 0.6, gap = s.t_c - t;
  const Vec expect = (1 / s.gamma) * (x / gap + s.gamma * x.norm() * x / (gap * gap));
  EXPECT_LE((sptc_an_activation(x, t, s) - expect).norm(), 1e-14);
}

TEST(SptcAnActivation, SecondBranchFormula) {
  ModelSpec s = benchmark_preset(ModelKind::SPTC_AN_FOZNN, 0.2, 0.5);
  const double tp = t_p_of(s.zeta, s.Delta, s.t_c);
  const Vec x{{0.3, -0.4}};
  const double t = 1.5, g = s.gamma * std::pow(t, s.alpha - 1);
  const double nx = x.norm();
  const Vec expect = (1 / g) * (x / (tp - t) + (s.zeta + g * nx * nx / ((tp - t) * (tp - t))) * x / nx);
  EXPECT_LE((sptc_an_activation(x, t, s) - expect).norm(), 1e-13);
}

TEST(SptcAnActivation, BranchIsHalfOpenAtTc) {
  ModelSpec s = benchmark_preset(ModelKind::SPTC_AN_FOZNN, 0.2, 0.5);
  const Vec x{{0.1}};
  const double tp = t_p_of(s.zeta, s.Delta, s.t_c);
  const double g = s.gamma;
  const double second = (1 / g) * (-x[0] / (1 - tp) + s.zeta + g * x[0] * x[0] / ((1 - tp) * (1 - tp)));
  EXPECT_NEAR(sptc_an_activation(x, s.t_c, s)[0], second, 1e-12);
}

TEST(SptcAnActivation, DenominatorFloor) {
  const auto s = an_spec();
  const Vec x{{0.2}};
  const double dt = 1e-3;
  EXPECT_NEAR(sptc_an_activation(x, s.t_c - 1e-6, s, dt)[0], sptc_an_activation(x, s.t_c - dt, s, dt)[0], 1e-8);
  EXPECT_TRUE(sptc_an_activation(x, s.t_c, s, dt).allFinite());
}

TEST(SptcAnActivation, HomogeneityDirection) {
  for_all(32, 300, [](Gen& g) {
    ModelSpec s = benchmark_preset(ModelKind::SPTC_AN_FOZNN, g.uniform(0, 1), g.uniform(0.05, 1));
    Vec x(4);
    for (int i = 0; i < 4; ++i) x[i] = g.uniform(-1, 1);
    const double c = g.uniform(0.01, 10), t = g.uniform(0.01, 3);
    const Vec out = sptc_an_activation(c * x, t, s, 1e-3);
    const double cosang = out.dot(x) / (out.norm() * x.norm());
    EXPECT_NEAR(std::abs(cosang), 1.0, 1e-12);
  });
}

TEST(DecayCommand, MatchesScaledActivationWithoutCap) {
  for_all(33, 100, [](Gen& g) {
    ModelSpec s = benchmark_preset(ModelKind::SPTC_AN_FOZNN, g.uniform(0, 1), g.uniform(0.05, 1));
    s.euler_gain_cap = false;
    Vec e(3);
    for (int i = 0; i < 3; ++i) e[i] = g.uniform(-1, 1);
    const double t = g.uniform(0.01, 3), dt = 1e-3;
    const Vec expect = s.gamma * std::pow(t, s.alpha - 1) * sptc_an_activation(e, t, s, dt);
    EXPECT_LE((decay_command(s, e, t, dt) - expect).norm(), 1e-9 * (1 + expect.norm()));
  });
}

TEST(DecayCommand, CapLimitsOnlyTheProportionalPart) {
  for (auto kind : {ModelKind::SPTC_AN_FOZNN, ModelKind::PTC_FOZNN, ModelKind::SPTC_NT_ZNN, ModelKind::ZNN}) {
    for_all(34, 100, [&](Gen& g) {
      ModelSpec s = benchmark_preset(kind, 0.5, g.uniform(0.05, 1));
      Vec e(3);
      for (int i = 0; i < 3; ++i) e[i] = g.uniform(-1, 1) * std::pow(10.0, g.uniform(-6, 0));
      const double t = g.uniform(0.001, 3), dt = 1e-3;
      const Vec u = decay_command(s, e, t, dt);
      const double switching = kind == ModelKind::SPTC_AN_FOZNN ? s.zeta
                               : kind == ModelKind::SPTC_NT_ZNN ? s.gamma * s.xi * std::sqrt(3.0)
                                                               : 0.0;
      EXPECT_LE(u.norm(), e.norm() / dt + switching + 1e-12);
    });
  }
}

TEST(DecayCommand, PtcFoznnFormula) {
  ModelSpec s = benchmark_preset(ModelKind::PTC_FOZNN, 0.0, 0.5);
  s.euler_gain_cap = false;
  const Vec e{{0.3, 0.4}};
  const double t = 0.7, n = 0.5;
  const double phi = std::numbers::pi / (2 * s.kappa * s.gamma * std::pow(s.t_c, s.alpha)) *
                     (std::pow(n, 1 - s.kappa) + std::pow(n, 1 + s.kappa));
  const Vec expect = s.gamma * std::pow(t, s.alpha - 1) * phi * e / n;
  EXPECT_LE((decay_command(s, e, t, 1e-3) - expect).norm(), 1e-13);
}

TEST(DecayCommand, SptcNtElementwise) {
  ModelSpec s = benchmark_preset(ModelKind::SPTC_NT_ZNN, 0.5);
  s.euler_gain_cap = false;
  const Vec e{{0.25, -0.04, 0.0}};
  const Vec before = decay_command(s, e, 0.5, 1e-3);
  EXPECT_LE((before - s.gamma * e / 0.5).norm(), 1e-14);
  const Vec after = decay_command(s, e, 1.5, 1e-3);
  for (int i = 0; i < 3; ++i) {
    const double a = std::abs(e[i]);
    const double sg = (e[i] > 0) - (e[i] < 0);
    EXPECT_NEAR(after[i], s.gamma * (e[i] + std::pow(a, s.p_exp) * sg + s.xi * sg), 1e-14);
  }
}

TEST(Rhs, EquilibriumForEveryModel) {
  const auto p = TimeVariantQP::constant(static_qp());
  const Vec y = Vec::LinSpaced(6, -0.5, 0.5);
  const KktState st(p.dims(), y, 0.5);
  const auto blocks = assemble_blocks(p, st);
  for (auto k : kAll) {
    const auto s = benchmark_preset(k, 0.0);
    const auto r = rhs(s, blocks, Vec::Zero(6), y, 0.5, Vec::Zero(6), RhsContext{});
    EXPECT_LE(r.ydot.cwiseAbs().maxCoeff(), 0.0) << to_string(k);
  }
}

TEST(Rhs, NormalizationFlagsDegenerate) {
  const auto p = TimeVariantQP::constant(static_qp());
  const Vec y = Vec::Zero(6);
  const auto blocks = assemble_blocks(p, KktState(p.dims(), y, 0.5));
  for (auto k : {ModelKind::PRAGNN, ModelKind::NIFZNN}) {
    const auto r = rhs(benchmark_preset(k, 0.0), blocks, Vec::Zero(6), y, 0.5, Vec::Zero(6), RhsContext{});
    EXPECT_TRUE(r.degenerate) << to_string(k);
  }
}

TEST(Rhs, GnnIsNegativeGradient) {
  const auto p = TimeVariantQP::constant(static_qp());
  const Vec y = Vec::LinSpaced(6, -1, 1);
  const auto blocks = assemble_blocks(p, KktState(p.dims(), y, 0.5));
  const Vec eps = blocks.P * y + blocks.q;
  const Vec delta = Vec::Constant(6, 0.1);
  const auto r = rhs(benchmark_preset(ModelKind::GNN, 0.1), blocks, eps, y, 0.5, delta, RhsContext{});
  EXPECT_LE((r.ydot - (-2.0 * blocks.M.transpose() * eps + delta)).norm(), 1e-13);
}

TEST(Rhs, FoGnnFirstStepIsRegularizedGradient) {
  const auto p = TimeVariantQP::constant(static_qp());
  const Vec y = Vec::LinSpaced(6, -1, 1);
  const auto blocks = assemble_blocks(p, KktState(p.dims(), y, 0.5));
  const Vec eps = blocks.P * y + blocks.q;
  const auto s = benchmark_preset(ModelKind::FO_GNN, 0.0, 0.5);
  const auto r = rhs(s, blocks, eps, y, 0.5, Vec::Zero(6), RhsContext{1e-3, nullptr});
  const Vec expect = -(s.gamma / gamma_fn(1.5)) * std::pow(s.fo_eps, 0.5) * blocks.M.transpose() * eps;
  EXPECT_LE((r.ydot - expect).norm(), 1e-15 + 1e-12 * expect.norm());
}

TEST(Rhs, ZnnSolvesLinearDecay) {
  const auto p = benchmark_problem();
  const Vec y = solve_at(p, 0.4).y() + Vec::Constant(7, 0.05);
  const auto blocks = assemble_blocks(p, KktState(p.dims(), y, 0.4));
  const Vec eps = blocks.P * y + blocks.q;
  const auto s = benchmark_preset(ModelKind::ZNN, 0.0);
  const auto r = rhs(s, blocks, eps, y, 0.4, Vec::Zero(7), RhsContext{});
  EXPECT_LE((blocks.M * r.ydot + blocks.N * y + blocks.sigma + s.gamma * eps).norm(), 1e-10);
}

TEST(Rhs, DimensionMismatch) {
  const auto p = TimeVariantQP::constant(static_qp());
  const auto blocks = assemble_blocks(p, KktState(p.dims(), Vec::Zero(6), 0.5));
  EXPECT_THROW(rhs(ModelSpec{}, blocks, Vec::Zero(5), Vec::Zero(6), 0.5, Vec::Zero(6), RhsContext{}),
               DimensionMismatch);
}

TEST(Rhs, GnnMonotoneOnStaticProblem) {
  const auto p = TimeVariantQP::constant(static_qp());
  Stepper st(benchmark_preset(ModelKind::GNN, 0.0), 1e-3);
  Vec y = seeded_uniform(9, 6);
  const QpSample sample = p.sample(0.0);
  double prev = st.evaluate(sample, y, 0.0).res_norm;
  for (int k = 0; k < 1000; ++k) {
    st.advance(sample, y, 1e-3 * k, Vec::Zero(6));
    const double now = st.evaluate(sample, y, 0.0).res_norm;
    ASSERT_LE(now, prev + 1e-15) << "step " << k;
    prev = now;
  }
}

TEST(Rhs, SptcAnReachesTolerancesByPredefinedTime) {
  const auto p = benchmark_problem();
  RunConfig cfg;
  cfg.model = an_spec(0.5);
  cfg.noise = NoiseChannel::zero(7);
  cfg.t_end = 1.0;
  cfg.y0 = KktState(p.dims(), solve_at(p, cfg.dt).y() + Vec::Constant(7, 0.1), cfg.dt);
  const auto log = integrate(p, cfg);
  EXPECT_LE(log.residual_at(1.0), 1e-4);
}

// Trajectory-level continuity at the switch: compare the residual just after
// t_c with its value just before.
TEST(Rhs, BranchSwitchHasNoResidualSpike) {
  const auto p = benchmark_problem();
  for (double alpha : {0.2, 0.5, 0.8}) {
    RunConfig cfg;
    cfg.model = an_spec(alpha);
    cfg.noise = NoiseChannel::zero(7);
    cfg.t_end = 1.2;
    cfg.y0 = KktState(p.dims(), solve_at(p, cfg.dt).y() + Vec::Constant(7, 0.1), cfg.dt);
    const auto log = integrate(p, cfg);
    const double dt = cfg.dt, tc = cfg.model.t_c;
    const double before = log.max_residual(tc - 10 * dt, tc - 0.5 * dt);
    const double after = log.max_residual(tc, tc + 10 * dt);
    EXPECT_LE(after, 2 * before) << "alpha " << alpha;
  }
}
