#include "tlsctl/rng.hpp"

#include <algorithm>
#include <cmath>

#include "tlsctl/units.hpp"

namespace tlsctl {
namespace {

constexpr std::uint32_t kPhiloxW32A = 0x9E3779B9;
constexpr std::uint32_t kPhiloxW32B = 0xBB67AE85;
constexpr std::uint32_t kPhiloxM4x32A = 0xD2511F53;
constexpr std::uint32_t kPhiloxM4x32B = 0xCD9E8D57;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(product);
  hi = static_cast<std::uint32_t>(product >> 32);
}

inline double to_unit53(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 21) ^ (lo >> 11);
  return static_cast<double>(bits & ((std::uint64_t{1} << 53) - 1)) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW32A;
      key[1] += kPhiloxW32B;
    }
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kPhiloxM4x32A, ctr[0], lo0, hi0);
    mulhilo(kPhiloxM4x32B, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::array<std::uint32_t, 4> CounterRng::block_at(std::uint64_t position) const {
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(position), static_cast<std::uint32_t>(position >> 32),
      static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
  const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed_),
                                            static_cast<std::uint32_t>(seed_ >> 32)};
  return philox4x32(ctr, key);
}

double CounterRng::uniform() {
  const auto b = next_block();
  return to_unit53(b[0], b[1]);
}

double CounterRng::uniform_open0() { return 1.0 - uniform(); }

double CounterRng::normal() {
  const auto b = next_block();
  const double u1 = 1.0 - to_unit53(b[0], b[1]);
  const double u2 = to_unit53(b[2], b[3]);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(units::kTwoPi * u2);
}

double CounterRng::log_uniform(double lo, double hi) {
  return std::clamp(std::exp(uniform(std::log(lo), std::log(hi))), lo, hi);
}

}  // namespace tlsctl
