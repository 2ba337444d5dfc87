#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace wise {

/// Philox4x64-10 block function (Salmon et al., SC'11). Stateless: the
/// output depends only on (counter, key), which is what makes replication
/// substreams reproducible independent of scheduling.
std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> counter,
                                        std::array<std::uint64_t, 2> key) noexcept;

/// Random-access uniform/normal stream keyed by (seed, stream id).
/// Element i of a stream is a pure function of (seed, stream, i).
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t stream) noexcept
      : seed_(seed), stream_(stream) {}

  std::uint64_t bits(std::uint64_t index) const noexcept;

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform(std::uint64_t index) const noexcept;

  /// out[i] = uniform(first + i), computing each Philox block once.
  void uniforms(std::uint64_t first, std::span<double> out) const noexcept;

  /// Standard normal by inverse-cdf transform of uniform(index).
  double normal(std::uint64_t index) const;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

}  // namespace wise
