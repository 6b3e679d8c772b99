#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "znnqp/numkit.hpp"

namespace znnqp {

/// Additive disturbance delta(t), held constant over one Euler step.
class NoiseChannel {
 public:
  enum class Kind { Zero, Sinusoid, BoundedWhite, Composite };

  static NoiseChannel zero(Eigen::Index dim);
  /// amp * cos(freq * t + phase_i); phase defaults to 0 in every component.
  static NoiseChannel sinusoid(Eigen::Index dim, double amp, double freq,
                               std::optional<Vec> phase = std::nullopt);
  /// amp * u with u fresh uniform on [-1, 1] per component and step.
  static NoiseChannel bounded_white(Eigen::Index dim, double amp, std::uint64_t seed);
  /// Element-wise sum; every part must have the same dim.
  static NoiseChannel composite(std::vector<NoiseChannel> parts);

  Kind kind() const noexcept { return kind_; }
  Eigen::Index dim() const noexcept { return dim_; }
  double amp() const noexcept { return amp_; }
  double freq() const noexcept { return freq_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const std::vector<NoiseChannel>& parts() const noexcept { return parts_; }

  /// Same channel with its own dimension replaced (and parts, recursively).
  NoiseChannel resized(Eigen::Index dim) const;
  /// Same channel with every white-noise seed replaced by a value derived from `seed`.
  NoiseChannel reseeded(std::uint64_t seed) const;

  Vec sample(double t, std::uint64_t step_index) const;
  /// Exact sup-norm bound of any sample.
  double inf_bound() const noexcept;
  std::string describe() const;

 private:
  NoiseChannel(Kind kind, Eigen::Index dim) : kind_(kind), dim_(dim) {}

  Kind kind_;
  Eigen::Index dim_;
  double amp_ = 0.0;
  double freq_ = 0.0;
  std::uint64_t seed_ = 0;
  std::optional<Vec> phase_;
  std::vector<NoiseChannel> parts_;
};

}  // namespace znnqp
