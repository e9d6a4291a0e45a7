#pragma once

#include <array>
#include <cstdint>

namespace tlsctl {

/// Philox4x32-10 block function (Salmon et al., SC'11). Pure: the output
/// depends only on (counter, key).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Counter-based random stream addressed by (seed, stream, position).
///
/// Every draw consumes exactly one Philox block, so the value returned at a
/// given position is reproducible without replaying the stream. Distribution
/// transforms are written out here rather than taken from <random> so that
/// streams are bit-identical across standard library implementations.
class CounterRng {
 public:
  CounterRng() = default;
  CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::uint64_t position() const { return position_; }
  void seek(std::uint64_t position) { position_ = position; }

  std::array<std::uint32_t, 4> block_at(std::uint64_t position) const;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1], never zero.
  double uniform_open0();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller (cosine branch only).
  double normal();
  double log_uniform(double lo, double hi);
  bool bernoulli(double p) { return uniform() < p; }

  friend bool operator==(const CounterRng&, const CounterRng&) = default;

 private:
  std::array<std::uint32_t, 4> next_block() { return block_at(position_++); }

  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  std::uint64_t position_ = 0;
};

/// Fixed stream identifiers so that each consumer of randomness in a world
/// has its own reproducible sequence.
namespace streams {
inline constexpr std::uint64_t kBathSample = 1;
inline constexpr std::uint64_t kDiffusion = 2;
inline constexpr std::uint64_t kShots = 3;
inline constexpr std::uint64_t kControl = 4;
}  // namespace streams

}  // namespace tlsctl
