#pragma once

#include <cstdint>
#include <random>

namespace bumplab {

// splitmix64 finalizer; used to derive independent per-index streams.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based splitter: the stream for (seed, index) does not depend on how
/// many other indices were drawn, so samples are stable under extension.
class StreamRng {
public:
  StreamRng(std::uint64_t seed, std::uint64_t index)
      : engine_(mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL))) {}

  /// Uniform in [0, 1) from the top 53 bits; portable across standard libraries.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi].
  long integer(long lo, long hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<long>(engine_() % span);
  }

private:
  std::mt19937_64 engine_;
};

} // namespace bumplab
