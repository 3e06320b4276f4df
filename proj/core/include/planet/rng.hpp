#ifndef PLANET_RNG_HPP
#define PLANET_RNG_HPP

#include <cstdint>
#include <utility>
#include <vector>

namespace planet {

// SplitMix64 stream. The algorithm is fixed here (not delegated to the
// standard library) so that a given seed produces identical output on
// every platform and standard-library implementation.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform-ish draw in [0, n); n > 0. Multiply-shift keeps it branch-free
  // and platform-stable.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  // Fisher-Yates.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

private:
  std::uint64_t state_;
};

// Derives an independent child seed from a parent seed and a stream tag.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  Rng r(seed ^ (0xd1b54a32d192ed03ULL * (tag + 1)));
  return r.next();
}

}  // namespace planet

#endif  // PLANET_RNG_HPP
