#pragma once

#include <array>
#include <cstdint>

namespace qmcabc {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key);

/// SplitMix64 finalizer; used to derive keys and seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent 64-bit seed from a base seed, a purpose tag and an index.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag, std::uint64_t index = 0) {
  return mix64(mix64(base ^ mix64(tag)) ^ mix64(index + 0x5851f42d4c957f2dULL));
}

// Counter-based uniform stream. The Philox counter is (block index, stream id), keyed by the seed,
// so distinct stream ids never share blocks and the output is independent of scheduling.
class UniformStream {
 public:
  using result_type = std::uint64_t;

  UniformStream(std::uint64_t seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0, 1).
  double uniform_open() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  /// Uniform integer in [0, bound) by Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t bound);

  /// Exponential with unit rate.
  double exponential();

 private:
  void refill();

  PhiloxKey key_{};
  std::uint64_t stream_id_ = 0;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

inline UniformStream fresh_uniform_stream(std::uint64_t seed, std::uint64_t stream_id) {
  return UniformStream(seed, stream_id);
}

}  // namespace qmcabc
