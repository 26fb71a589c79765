#pragma once
// Counter-based random number generation.
//
// Every random draw in the library is a pure function of
// (seed, stream, tag, index, counter), realized with the SplitMix64 mixing
// function. Nothing depends on call order or thread scheduling, so a sampled
// matrix is bit-identical no matter how many workers run, and any single
// row's randomness can be regenerated in isolation.

#include <cmath>
#include <cstdint>

namespace rmtsharp {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer: a bijective 64-bit mix with good avalanche behavior.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Identifies an independent random stream; (seed, stream) pairs that differ
// anywhere produce unrelated draws. `stream` is conventionally the trial id.
struct SeededRng {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  // Deterministic 64-bit value for a (tag, index) cell of this stream.
  std::uint64_t at(std::uint64_t tag, std::uint64_t index) const {
    std::uint64_t h = mix64(seed + kGolden);
    h = mix64(h ^ (stream + kGolden));
    h = mix64(h ^ (tag + kGolden));
    h = mix64(h ^ (index + kGolden));
    return h;
  }
};

// Namespaced tags keep unrelated uses of the same (seed, stream) decorrelated.
namespace rng_tag {
inline constexpr std::uint64_t kUpper = 0x55;    // pair scan, j > i
inline constexpr std::uint64_t kLower = 0x4C;    // pair scan, j < i
inline constexpr std::uint64_t kTheta = 0x54;    // per-pair orientation coin
inline constexpr std::uint64_t kRow = 0x52;      // dense i.i.d. row scan
inline constexpr std::uint64_t kSubset = 0x53;   // structure-audit subsets
inline constexpr std::uint64_t kProbe = 0x50;    // iterative-solver start vectors
inline constexpr std::uint64_t kVector = 0x58;   // auxiliary random vectors
}  // namespace rng_tag

// A lazily evaluated sequence of draws rooted at one (rng, tag, index) cell.
class CounterStream {
 public:
  CounterStream(const SeededRng& rng, std::uint64_t tag, std::uint64_t index)
      : state_(rng.at(tag, index)) {}

  std::uint64_t next_u64() {
    state_ += kGolden;
    return mix64(state_);
  }

  // Uniform on [0,1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1]; safe under log().
  double next_unit_positive() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  bool next_bernoulli(double p) { return next_unit() < p; }

  // Uniform integer in [0, bound) by rejection-free scaled multiply.
  std::uint64_t next_below(std::uint64_t bound) {
    // 128-bit multiply-shift maps the 64-bit draw uniformly enough for
    // combinatorial sampling (bias < 2^-64 per draw).
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

 private:
  std::uint64_t state_;
};

// Visits the hit positions of independent Bernoulli(q) trials over [lo, hi)
// in O(q.(hi-lo)) expected draws using geometric skips, instead of one draw
// per position. The callback receives each hit position in increasing order.
template <typename Emit>
void bernoulli_hits(CounterStream& cs, long lo, long hi, double q, Emit&& emit) {
  if (q <= 0.0 || lo >= hi) return;
  const double log_miss = std::log1p(-q);  // log(1-q) < 0 since q in (0,1)
  long pos = lo;
  while (pos < hi) {
    const double u = cs.next_unit_positive();
    const double skip = std::floor(std::log(u) / log_miss);
    if (skip >= static_cast<double>(hi - pos)) break;
    pos += static_cast<long>(skip);
    emit(pos);
    ++pos;
  }
}

}  // namespace rmtsharp
