#pragma once

#include "znnqp/tvqp.hpp"

namespace znnqp {

/// The two-variable benchmark TVQP with one rotating equality constraint and
/// the box -1.3 <= x1, x2 <= 1.3 (n = 2, m = 1, p = 4). All rates are analytic.
TimeVariantQP benchmark_problem();

/// Box half-width of benchmark_problem().
inline constexpr double kBenchmarkBox = 1.3;

}  // namespace znnqp
