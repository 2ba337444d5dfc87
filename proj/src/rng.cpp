#include "wise/rng.hpp"

#include "wise/numeric.hpp"

namespace wise {

namespace {

constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

}  // namespace

std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> c,
                                        std::array<std::uint64_t, 2> k) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

std::uint64_t CounterStream::bits(std::uint64_t index) const noexcept {
  // One block yields four words; element i lives in block i/4, lane i%4.
  const auto block = philox4x64({index >> 2, 0, 0, 0}, {seed_, stream_});
  return block[index & 3U];
}

double CounterStream::uniform(std::uint64_t index) const noexcept {
  return (static_cast<double>(bits(index) >> 11) + 0.5) * 0x1.0p-53;
}

void CounterStream::uniforms(std::uint64_t first, std::span<double> out) const noexcept {
  std::size_t i = 0;
  while (i < out.size()) {
    const std::uint64_t index = first + i;
    const auto block = philox4x64({index >> 2, 0, 0, 0}, {seed_, stream_});
    for (std::uint64_t lane = index & 3U; lane < 4 && i < out.size(); ++lane, ++i) {
      out[i] = (static_cast<double>(block[lane] >> 11) + 0.5) * 0x1.0p-53;
    }
  }
}

double CounterStream::normal(std::uint64_t index) const {
  return normal_quantile(uniform(index));
}

}  // namespace wise
