#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace sslse {

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Mixes a base seed with a stream index into an independent seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// FNV-1a over the bytes of `text`, used to key per-tensor init streams.
std::uint64_t fnv1a64(std::string_view text) noexcept;

/// xoshiro256** generator. The full state is 32 bytes so it can be stored
/// verbatim in checkpoints. All derived draws (uniform, normal, shuffle) are
/// implemented here so results do not depend on the standard library vendor.
class Rng {
 public:
  using State = std::array<std::uint64_t, 4>;

  explicit Rng(std::uint64_t seed = 0) noexcept;

  static Rng from_state(const State& state) noexcept;
  const State& state() const noexcept { return s_; }

  std::uint64_t next() noexcept;
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept;
  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) noexcept;
  /// Standard normal via Box-Muller, one draw per call.
  double normal() noexcept;
  bool bernoulli(double p) noexcept;

  template <typename T>
  void shuffle(std::span<T> values) noexcept {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  State s_{};
};

}  // namespace sslse
