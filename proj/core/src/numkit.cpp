#include "znnqp/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "znnqp/errors.hpp"

namespace znnqp {

SolveResult solve_square(const Mat& M, const Vec& r) {
  if (M.rows() != M.cols()) {
    throw DimensionMismatch("solve_square: matrix is " + std::to_string(M.rows()) + "x" +
                            std::to_string(M.cols()) + ", expected square");
  }
  if (r.size() != M.rows()) {
    throw DimensionMismatch("solve_square: rhs has " + std::to_string(r.size()) +
                            " entries, matrix has " + std::to_string(M.rows()) + " rows");
  }
  if (M.rows() == 0) return {Vec(0), false};

  Eigen::PartialPivLU<Mat> lu(M);
  const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (min_pivot >= kPivotThreshold && std::isfinite(min_pivot)) {
    return {lu.solve(r), false};
  }
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(M);
  return {cod.solve(r), true};
}

double gamma_fn(double z) {
  if (!(z > 0.0) || z > 2.0) {
    throw DomainError("gamma_fn: argument " + std::to_string(z) + " outside (0, 2]");
  }
  return std::tgamma(z);
}

double central_diff(const std::function<double(double)>& f, double t) {
  const double h = 1e-6 * std::max(1.0, std::abs(t));
  return (f(t + h) - f(t - h)) / (2.0 * h);
}

double conformable_deriv(const std::function<double(double)>& f, double t, double alpha) {
  if (!(t > 0.0)) throw DomainError("conformable_deriv: t must be positive");
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw DomainError("conformable_deriv: alpha must lie in (0, 1]");
  }
  return std::pow(t, 1.0 - alpha) * central_diff(f, t);
}

double unit_symmetric(std::uint64_t word) noexcept {
  // 53 random mantissa bits -> [0, 1) -> [-1, 1)
  const double u = static_cast<double>(word >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

namespace {

Vec draw(std::seed_seq& seq, std::size_t n) {
  std::mt19937_64 engine(seq);
  Vec out(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) out[static_cast<Eigen::Index>(i)] = unit_symmetric(engine());
  return out;
}

std::uint32_t lo(std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); }
std::uint32_t hi(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

}  // namespace

Vec seeded_uniform(std::uint64_t seed, std::size_t n) {
  std::seed_seq seq{lo(seed), hi(seed)};
  return draw(seq, n);
}

Vec seeded_uniform(std::uint64_t seed, std::uint64_t stream, std::size_t n) {
  std::seed_seq seq{lo(seed), hi(seed), lo(stream), hi(stream), 0x5eedu};
  return draw(seq, n);
}

}  // namespace znnqp
