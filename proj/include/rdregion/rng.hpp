#pragma once

// Counter-based generator: SplitMix64 streams keyed by (seed, trial, stream, index).
// Only integer arithmetic and an exact 53-bit mantissa conversion are used, so draws are
// identical on every platform and independent of scheduling.

#include <cstdint>
#include <span>

namespace rdregion {

constexpr std::uint64_t splitmix_finalize(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t trial, std::uint64_t stream,
                                   std::uint64_t index = 0) noexcept {
  constexpr std::uint64_t golden = 0x9e3779b97f4a7c15ULL;
  std::uint64_t k = splitmix_finalize(seed + golden);
  k = splitmix_finalize(k ^ (trial + golden));
  k = splitmix_finalize(k ^ (stream * golden + 0x632be59bd9b4e019ULL));
  return splitmix_finalize(k ^ (index + 0xd1b54a32d192ed03ULL));
}

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t key) noexcept : state_(key) {}

  constexpr std::uint64_t next() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return splitmix_finalize(state_);
  }

  // Uniform on [0, 1) with 53 random bits.
  constexpr double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Index k with cdf[k-1] <= u < cdf[k]; `cdf` is nondecreasing, `last` is the highest index
  // with positive mass (used when rounding leaves cdf.back() slightly below 1).
  std::size_t categorical(std::span<const double> cdf, std::size_t last) noexcept {
    const double u = uniform();
    for (std::size_t k = 0; k < cdf.size(); ++k)
      if (u < cdf[k]) return k;
    return last;
  }

 private:
  std::uint64_t state_;
};

}  // namespace rdregion
