#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace hydrolim {

// splitmix64 finalizer; used to derive independent stream seeds from a
// master seed plus structural tags (N, replica, purpose).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = splitmix64(master ^ 0x7f4a7c15c0ffee01ULL);
  s = splitmix64(s ^ a);
  s = splitmix64(s ^ b);
  s = splitmix64(s ^ c);
  return s;
}

// mt19937_64 wrapper with hand-rolled variate transforms, so that draws are
// bit-identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // uniform on [0,1)
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // uniform on (0,1]
  double uniform_pos() { return 1.0 - uniform(); }

  // exponential waiting time; a nonpositive rate means "never"
  double exponential(double rate) {
    const double u = uniform_pos();
    if (!(rate > 0)) return std::numeric_limits<double>::infinity();
    return -std::log(u) / rate;
  }

  bool bernoulli(double prob) { return uniform() < prob; }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace hydrolim
