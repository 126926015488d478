#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace actmine {

// FNV-1a over the byte representation of a stream tag. Used to derive
// independent RNG streams from (seed, tag) pairs so that results do not
// depend on scheduling or iteration order.
inline std::uint64_t hash_combine(std::uint64_t h, std::string_view s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xffULL;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic keyed stream. mt19937_64 is fully specified by the standard
// and the uniform/gauss conversions below avoid the implementation-defined
// std::*_distribution, so streams are reproducible across platforms.
class KeyedRng {
 public:
  explicit KeyedRng(std::uint64_t key) : gen_(splitmix64(key)) {}

  // one draw in [0, 1)
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Box-Muller, one value per call (the pair's second half is cached)
  double gauss() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  std::uint64_t next_u64() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Key builder: fold a seed and a sequence of tags/indices into one stream key.
struct StreamKey {
  std::uint64_t h = 0xcbf29ce484222325ULL;

  StreamKey &operator<<(std::string_view s) {
    h = hash_combine(h, s);
    return *this;
  }
  StreamKey &operator<<(std::uint64_t v) {
    h = hash_combine(h, v);
    return *this;
  }
  StreamKey &operator<<(int v) {
    h = hash_combine(h, static_cast<std::uint64_t>(v));
    return *this;
  }

  KeyedRng rng() const { return KeyedRng(h); }
};

}  // namespace actmine
