#pragma once

#include <cstdint>

namespace ae {

std::uint64_t splitmix64(std::uint64_t x);

/// SplitMix64 stream keyed by a counter tuple. Each (seed, stream, frame, part)
/// key owns an independent sequence, so draws never depend on how many numbers
/// other frames or parts consumed. All samplers are implemented here rather
/// than taken from <random>, whose distributions differ between standard
/// libraries.
class CounterRng {
public:
  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t frame, std::uint64_t part);

  std::uint64_t next();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  /// Standard normal (Box-Muller, cosine branch only).
  double normal();
  /// Gamma(shape, 1) by Marsaglia-Tsang.
  double gamma(double shape);
  double beta(double a, double b);

private:
  std::uint64_t state_;
};

namespace streams {
inline constexpr std::uint64_t kDetections = 1;
inline constexpr std::uint64_t kLayout = 2;
inline constexpr std::uint64_t kScript = 3;
inline constexpr std::uint64_t kGenerator = 4;
} // namespace streams

} // namespace ae
