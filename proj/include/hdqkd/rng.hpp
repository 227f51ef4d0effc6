#pragma once

#include <cstdint>

namespace hdqkd {

// Counter-based splittable pseudo-random stream (SplitMix64 core).
//
// Streams are derived, not advanced-and-shared: derive(seed, tag, index)
// yields an independent stream for every (tag, index) pair, so work can be
// partitioned across threads with bitwise-reproducible results for a fixed
// master seed and any worker count.
class Rng {
 public:
  explicit Rng(std::uint64_t state) noexcept : state_(state) {}

  static std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static Rng derive(std::uint64_t seed, std::uint64_t tag,
                    std::uint64_t index = 0) noexcept {
    std::uint64_t h = mix(seed + 0x9e3779b97f4a7c15ULL * (tag + 1));
    h = mix(h ^ (0xd1b54a32d192ed03ULL * (index + 1)));
    return Rng(h);
  }

  std::uint64_t next_u64() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // Uniform in [0,1) with 53 random bits.
  double next_double() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n), unbiased (rejection sampling).
  std::uint64_t below(std::uint64_t n) noexcept {
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    std::uint64_t r;
    do {
      r = next_u64();
    } while (r < threshold);
    return r % n;
  }

 private:
  std::uint64_t state_;
};

// Stream purpose tags. Keeping them distinct prevents accidental reuse of a
// stream across unrelated draws within one seeded run.
namespace stream_tag {
inline constexpr std::uint64_t subset = 1;  // test-subset permutation
inline constexpr std::uint64_t bases = 2;   // per-test-position basis string s
inline constexpr std::uint64_t labels = 3;  // per-round channel Bell labels
inline constexpr std::uint64_t trial = 4;   // Monte Carlo trial streams
inline constexpr std::uint64_t word = 5;    // adversarial word construction
}  // namespace stream_tag

}  // namespace hdqkd
