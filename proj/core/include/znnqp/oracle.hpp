#pragma once

#include <cstddef>
#include <vector>

#include "znnqp/tvqp.hpp"

namespace znnqp {

struct OracleSolution {
  double t = 0.0;
  Vec x_star;
  Vec phi_star;
  Vec varphi_star;           ///< length p, zero off the active set
  std::vector<int> active_set;  ///< ascending inequality indices held tight
  double objective = 0.0;

  /// Stacked [x; phi; varphi], usable as an initial KKT state.
  Vec y() const;
};

inline constexpr double kOraclePrimalTol = 1e-10;
inline constexpr double kOracleDualTol = 1e-10;
inline constexpr Eigen::Index kOracleMaxInequalities = 24;

/// Every active set whose equality-constrained KKT system is nonsingular and
/// whose solution is primal and dual feasible, in enumeration order.
std::vector<OracleSolution> enumerate_kkt_points(const QpData& data, double t = 0.0);

/// Exact KKT point by active-set enumeration. Among valid candidates the
/// smallest objective wins, then the lexicographically smallest active set.
/// Throws Infeasible when no candidate is valid, IllPosed when every
/// candidate system is singular, DomainError when p > 24.
OracleSolution solve_at(const QpData& data, double t = 0.0);
OracleSolution solve_at(const TimeVariantQP& problem, double t);

struct SolutionPath {
  std::vector<OracleSolution> solutions;
  /// Indices i > 0 where the active set differs from sample i - 1.
  std::vector<std::size_t> switches;
};

/// solve_at on every grid point; t_grid must be ascending.
SolutionPath solution_path(const TimeVariantQP& problem, const std::vector<double>& t_grid);

/// max |H x + rho + A'phi + C'varphi|, |Ax - b|, max(Cx - d, 0), |varphi_i (d - Cx)_i|.
double exact_kkt_violation(const QpData& data, const OracleSolution& s);

}  // namespace znnqp
