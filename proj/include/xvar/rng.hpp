#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include <xvar/errors.hpp>

namespace xvar {

// Philox4x32-10 counter generator (Salmon et al., SC'11). Chosen because
// draw i of stream s depends only on (seed, s, i): samplers can be
// parallelized or resumed at any offset without replaying the stream, and
// results are bit-identical across platforms. Verified against the
// published known-answer vectors in the test suite.
struct Philox4x32 {
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> x,
                                            std::array<std::uint32_t, 2> key) {
    for (int round = 0;; ++round) {
      const std::uint64_t p0 = std::uint64_t{kMul0} * x[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * x[2];
      x = {static_cast<std::uint32_t>(p1 >> 32) ^ x[1] ^ key[0],
           static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ x[3] ^ key[1],
           static_cast<std::uint32_t>(p0)};
      if (round == 9) break;
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return x;
  }
};

// Seeded family of independent streams. uniform() is strictly inside (0,1)
// so log(1-u) and 1/(1-u) never overflow.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)} {}

  std::uint64_t bits(std::uint32_t stream, std::uint64_t index) const {
    const auto y = Philox4x32::block({static_cast<std::uint32_t>(index),
                                      static_cast<std::uint32_t>(index >> 32),
                                      stream, 0u},
                                     key_);
    return (std::uint64_t{y[0]} << 32) | y[1];
  }

  double uniform(std::uint32_t stream, std::uint64_t index) const {
    return (static_cast<double>(bits(stream, index) >> 11) + 0.5) * 0x1p-53;
  }

  double exponential(std::uint32_t stream, std::uint64_t index) const {
    return -std::log1p(-uniform(stream, index));
  }

 private:
  std::array<std::uint32_t, 2> key_;
};

}  // namespace xvar
