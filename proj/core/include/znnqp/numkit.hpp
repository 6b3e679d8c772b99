#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Dense>

namespace znnqp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Result of a dense square solve. `degenerate` is set when a pivot fell
/// below the singularity threshold and the minimum-norm least-squares path
/// produced `x` instead of the LU factorization.
struct SolveResult {
  Vec x;
  bool degenerate = false;
};

inline constexpr double kPivotThreshold = 1e-12;

/// Solves M x = r with partial pivoting. Throws DimensionMismatch when M is
/// not square or r does not match.
SolveResult solve_square(const Mat& M, const Vec& r);

/// Euler gamma function on (0, 2]. Throws DomainError outside that range.
double gamma_fn(double z);

/// Central difference f'(t) with step h = 1e-6 * max(1, |t|).
double central_diff(const std::function<double(double)>& f, double t);

/// Conformable fractional derivative t^(1-alpha) f'(t) for 0 < alpha <= 1.
/// Throws DomainError for t <= 0 or alpha outside (0, 1].
double conformable_deriv(const std::function<double(double)>& f, double t, double alpha);

/// Maps one 64-bit generator word to [-1, 1) using its top 53 bits.
double unit_symmetric(std::uint64_t word) noexcept;

/// n samples i.i.d. uniform on [-1, 1], reproducible bit-for-bit for a seed.
///
/// The generator is std::mt19937_64 seeded through std::seed_seq with the
/// seed split into two 32-bit words; both algorithms are fixed by the C++
/// standard, so the stream is identical across platforms and toolchains.
Vec seeded_uniform(std::uint64_t seed, std::size_t n);

/// Like seeded_uniform but keyed by (seed, stream); used for per-step noise
/// so that any step can be replayed without generating the ones before it.
Vec seeded_uniform(std::uint64_t seed, std::uint64_t stream, std::size_t n);

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) noexcept {
  return m.allFinite();
}

}  // namespace znnqp
