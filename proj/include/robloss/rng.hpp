#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace robloss {

/// Counter-based 64-bit generator (splitmix64, Steele et al. constants).
/// Every seeded artifact in this project draws from this stream so that
/// plans, datasets and initializations reproduce bit-for-bit across
/// platforms and implementations. The update is
///   state += 0x9e3779b97f4a7c15
///   z = state; z = (z ^ z>>30) * 0xbf58476d1ce4e5b9
///   z = (z ^ z>>27) * 0x94d049bb133111eb; return z ^ z>>31
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Unbiased draw from {0, ..., range-1} via rejection of the tail
  /// remainder of the 2^64 space. range must be >= 1.
  std::uint64_t bounded(std::uint64_t range) {
    const std::uint64_t rem =
        (std::numeric_limits<std::uint64_t>::max() % range + 1) % range;
    std::uint64_t r = next();
    while (rem != 0 &&
           r >= std::numeric_limits<std::uint64_t>::max() - rem + 1) {
      r = next();
    }
    return r % range;
  }

  /// Uniform double in [0, 1): top 53 bits scaled by 2^-53.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller. Two uniforms per call; the first is
  /// shifted into (0, 1] so the log never sees zero.
  double gaussian() {
    const double u1 = (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
};

/// Stream tags: deriving a sub-stream from a seed mixes in one of these
/// constants so that independent uses of the same user seed do not collide.
namespace stream_tag {
inline constexpr std::uint64_t kLabelFlip = 0x6c62272e07bb0142ULL;
inline constexpr std::uint64_t kBlobMeans = 0x243f6a8885a308d3ULL;
inline constexpr std::uint64_t kBlobNoise = 0x13198a2e03707344ULL;
inline constexpr std::uint64_t kGraspTruth = 0xa4093822299f31d0ULL;
inline constexpr std::uint64_t kGraspPerturb = 0x082efa98ec4e6c89ULL;
}  // namespace stream_tag

}  // namespace robloss
