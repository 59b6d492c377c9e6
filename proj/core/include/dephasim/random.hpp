#pragma once

#include <cstdint>
#include <limits>

namespace dephasim {

// Counter-based stream: output i is a bijective 64-bit mix of (key + i * golden),
// with the key derived from (seed, stream, substream). Two streams with distinct
// key triples are statistically independent and no draw depends on scheduling.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    counter_ += kGolden;
    return mix(key_ + counter_);
  }

  // Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }
  // Exponential with unit rate.
  double exponential();
  // Standard Cauchy (unit half-width).
  double cauchy();
  bool coin() { return ((*this)() >> 63) != 0; }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Reserved substream indices that never collide with TLS indices.
inline constexpr std::uint64_t kEnsembleSubstream = std::numeric_limits<std::uint64_t>::max();
inline constexpr std::uint64_t kFixedEnsembleRun = std::numeric_limits<std::uint64_t>::max();

// Streams of one Monte Carlo run; one substream per TLS.
struct RunStreams {
  std::uint64_t seed = 0;
  std::uint64_t run = 0;

  RandomStream tls(std::uint64_t index) const { return {seed, run, index}; }
  RandomStream ensemble() const { return {seed, run, kEnsembleSubstream}; }
};

}  // namespace dephasim
