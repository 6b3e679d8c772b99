#include "znnqp/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <utility>

#include <fmt/format.h>

#include "znnqp/errors.hpp"

namespace znnqp {

Vec OracleSolution::y() const {
  Vec out(x_star.size() + phi_star.size() + varphi_star.size());
  out << x_star, phi_star, varphi_star;
  return out;
}

namespace {

struct Enumeration {
  std::vector<OracleSolution> valid;
  std::size_t tried = 0;
  std::size_t singular = 0;
};

Enumeration enumerate(const QpData& v, double t) {
  const QpDims dims = v.dims();
  v.check(dims);
  if (dims.p > kOracleMaxInequalities) {
    throw DomainError(fmt::format("oracle enumeration limited to p <= {}, got {}",
                                  kOracleMaxInequalities, dims.p));
  }
  const Eigen::Index n = dims.n, m = dims.m, p = dims.p;
  Enumeration e;
  const std::uint32_t count = 1u << p;
  std::vector<int> set;
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    const int s = std::popcount(mask);
    // More tight rows than variables always gives a singular KKT matrix.
    if (m + s > n) continue;
    set.clear();
    for (int i = 0; i < p; ++i) {
      if (mask & (1u << i)) set.push_back(i);
    }
    ++e.tried;

    const Eigen::Index k = n + m + s;
    Mat K = Mat::Zero(k, k);
    Vec r(k);
    K.topLeftCorner(n, n) = v.H;
    K.block(0, n, n, m) = v.A.transpose();
    K.block(n, 0, m, n) = v.A;
    r.head(n) = -v.rho;
    r.segment(n, m) = v.b;
    for (int j = 0; j < s; ++j) {
      K.block(0, n + m + j, n, 1) = v.C.row(set[j]).transpose();
      K.block(n + m + j, 0, 1, n) = v.C.row(set[j]);
      r[n + m + j] = v.d[set[j]];
    }
    const SolveResult sol = solve_square(K, r);
    if (sol.degenerate || !all_finite(sol.x)) {
      ++e.singular;
      continue;
    }

    const Vec x = sol.x.head(n);
    const Vec slack = v.d - v.C * x;
    bool ok = true;
    for (Eigen::Index i = 0; i < p && ok; ++i) {
      ok = slack[i] >= -kOraclePrimalTol * (1.0 + std::abs(v.d[i]));
    }
    for (int j = 0; j < s && ok; ++j) ok = sol.x[n + m + j] >= -kOracleDualTol;
    if (!ok) continue;

    OracleSolution cand;
    cand.t = t;
    cand.x_star = x;
    cand.phi_star = sol.x.segment(n, m);
    cand.varphi_star = Vec::Zero(p);
    for (int j = 0; j < s; ++j) cand.varphi_star[set[j]] = sol.x[n + m + j];
    cand.active_set = set;
    cand.objective = 0.5 * x.dot(v.H * x) + v.rho.dot(x);
    e.valid.push_back(std::move(cand));
  }
  return e;
}

bool better(const OracleSolution& a, const OracleSolution& b) {
  const double tol = 1e-12 * (1.0 + std::abs(b.objective));
  if (a.objective < b.objective - tol) return true;
  if (a.objective > b.objective + tol) return false;
  return a.active_set < b.active_set;
}

}  // namespace

std::vector<OracleSolution> enumerate_kkt_points(const QpData& data, double t) {
  return enumerate(data, t).valid;
}

OracleSolution solve_at(const QpData& data, double t) {
  Enumeration e = enumerate(data, t);
  if (e.valid.empty()) {
    if (e.tried > 0 && e.singular == e.tried) {
      throw IllPosed(fmt::format("every KKT system is singular at t = {}", t), t);
    }
    throw Infeasible(fmt::format("no feasible KKT point at t = {}", t), t);
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < e.valid.size(); ++i) {
    if (better(e.valid[i], e.valid[best])) best = i;
  }
  return std::move(e.valid[best]);
}

OracleSolution solve_at(const TimeVariantQP& problem, double t) {
  return solve_at(problem.sample(t).value, t);
}

SolutionPath solution_path(const TimeVariantQP& problem, const std::vector<double>& t_grid) {
  if (!std::is_sorted(t_grid.begin(), t_grid.end())) {
    throw DomainError("solution_path: time grid must be ascending");
  }
  SolutionPath out;
  out.solutions.reserve(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    out.solutions.push_back(solve_at(problem, t_grid[i]));
    if (i > 0 && out.solutions[i].active_set != out.solutions[i - 1].active_set) {
      out.switches.push_back(i);
    }
  }
  return out;
}

double exact_kkt_violation(const QpData& v, const OracleSolution& s) {
  const Vec stat = v.H * s.x_star + v.rho + v.A.transpose() * s.phi_star +
                   v.C.transpose() * s.varphi_star;
  const Vec eq = v.A * s.x_star - v.b;
  const Vec slack = v.d - v.C * s.x_star;
  double worst = 0.0;
  if (stat.size()) worst = std::max(worst, stat.cwiseAbs().maxCoeff());
  if (eq.size()) worst = std::max(worst, eq.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < slack.size(); ++i) {
    worst = std::max(worst, -slack[i]);
    worst = std::max(worst, -s.varphi_star[i]);
    worst = std::max(worst, std::abs(s.varphi_star[i] * slack[i]));
  }
  return worst;
}

}  // namespace znnqp
