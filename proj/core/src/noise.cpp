#include "znnqp/noise.hpp"

#include <cmath>
#include <utility>

#include <fmt/format.h>

#include "znnqp/errors.hpp"

namespace znnqp {

namespace {

void require_dim(Eigen::Index dim) {
  if (dim < 1) throw DomainError("noise channel dimension must be at least 1");
}

void require_amp(double amp) {
  if (!(amp >= 0.0) || !std::isfinite(amp)) {
    throw DomainError(fmt::format("noise amplitude must be finite and >= 0, got {}", amp));
  }
}

// splitmix64 finalizer, used to derive distinct member seeds.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

NoiseChannel NoiseChannel::zero(Eigen::Index dim) {
  require_dim(dim);
  return NoiseChannel(Kind::Zero, dim);
}

NoiseChannel NoiseChannel::sinusoid(Eigen::Index dim, double amp, double freq,
                                    std::optional<Vec> phase) {
  require_dim(dim);
  require_amp(amp);
  if (!std::isfinite(freq)) throw DomainError("sinusoid frequency must be finite");
  if (phase && phase->size() != dim) {
    throw DimensionMismatch(
        fmt::format("sinusoid phase has {} entries, channel has {}", phase->size(), dim));
  }
  NoiseChannel ch(Kind::Sinusoid, dim);
  ch.amp_ = amp;
  ch.freq_ = freq;
  ch.phase_ = std::move(phase);
  return ch;
}

NoiseChannel NoiseChannel::bounded_white(Eigen::Index dim, double amp, std::uint64_t seed) {
  require_dim(dim);
  require_amp(amp);
  NoiseChannel ch(Kind::BoundedWhite, dim);
  ch.amp_ = amp;
  ch.seed_ = seed;
  return ch;
}

NoiseChannel NoiseChannel::composite(std::vector<NoiseChannel> parts) {
  if (parts.empty()) throw DomainError("composite noise needs at least one part");
  const Eigen::Index dim = parts.front().dim();
  for (const auto& p : parts) {
    if (p.dim() != dim) throw DimensionMismatch("composite noise parts differ in dimension");
  }
  NoiseChannel ch(Kind::Composite, dim);
  ch.parts_ = std::move(parts);
  return ch;
}

NoiseChannel NoiseChannel::resized(Eigen::Index dim) const {
  require_dim(dim);
  NoiseChannel out = *this;
  out.dim_ = dim;
  if (out.phase_ && out.phase_->size() != dim) {
    throw DimensionMismatch("cannot resize a sinusoid with an explicit phase vector");
  }
  for (auto& p : out.parts_) p = p.resized(dim);
  return out;
}

NoiseChannel NoiseChannel::reseeded(std::uint64_t seed) const {
  NoiseChannel out = *this;
  if (kind_ == Kind::BoundedWhite) out.seed_ = seed;
  for (std::size_t i = 0; i < out.parts_.size(); ++i) {
    out.parts_[i] = out.parts_[i].reseeded(i == 0 ? seed : mix(seed + i));
  }
  return out;
}

Vec NoiseChannel::sample(double t, std::uint64_t step_index) const {
  switch (kind_) {
    case Kind::Zero:
      return Vec::Zero(dim_);
    case Kind::Sinusoid:
      if (phase_) return amp_ * (freq_ * t + phase_->array()).cos().matrix();
      return Vec::Constant(dim_, amp_ * std::cos(freq_ * t));
    case Kind::BoundedWhite:
      // Clamp guards the one-ulp overshoot amp*u can have when amp is not a power of two.
      return (amp_ * seeded_uniform(seed_, step_index, static_cast<std::size_t>(dim_)))
          .cwiseMax(-amp_)
          .cwiseMin(amp_);
    case Kind::Composite: {
      Vec out = Vec::Zero(dim_);
      for (const auto& p : parts_) out += p.sample(t, step_index);
      return out.cwiseMax(-inf_bound()).cwiseMin(inf_bound());
    }
  }
  return Vec::Zero(dim_);
}

double NoiseChannel::inf_bound() const noexcept {
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::Sinusoid:
    case Kind::BoundedWhite:
      return amp_;
    case Kind::Composite: {
      double s = 0.0;
      for (const auto& p : parts_) s += p.inf_bound();
      return s;
    }
  }
  return 0.0;
}

std::string NoiseChannel::describe() const {
  switch (kind_) {
    case Kind::Zero:
      return "zero";
    case Kind::Sinusoid:
      return fmt::format("{}cos({}t)", amp_, freq_);
    case Kind::BoundedWhite:
      return fmt::format("{}white", amp_);
    case Kind::Composite: {
      std::string s;
      for (const auto& p : parts_) {
        if (!s.empty()) s += "+";
        s += p.describe();
      }
      return s;
    }
  }
  return "?";
}

}  // namespace znnqp
