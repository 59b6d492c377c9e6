#include "dephasim/random.hpp"

#include <cmath>
#include <numbers>

namespace dephasim {

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream) {
  std::uint64_t k = mix(seed ^ 0x6a09e667f3bcc909ULL);
  k = mix(k ^ (stream * 0xd1b54a32d192ed03ULL + 0x3c6ef372fe94f82bULL));
  k = mix(k ^ (substream * 0x8cb92ba72f3d8dd7ULL + 0xa54ff53a5f1d36f1ULL));
  key_ = k;
}

double RandomStream::exponential() { return -std::log(uniform()); }

double RandomStream::cauchy() { return std::tan(std::numbers::pi * (uniform() - 0.5)); }

}  // namespace dephasim
