#ifndef PHYLOKERN_RNG_HPP
#define PHYLOKERN_RNG_HPP

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace phylokern {

// Counter-based generator (SplitMix64). Streams are derived by hashing a
// root seed with a path of indices, so every logical unit of work
// (replicate, sample, permutation) owns an independent stream and results
// do not depend on how work is scheduled across threads.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t state) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type(0); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Hash-derives a substream: derive(seed, {a, b}) and derive(seed, {a, c})
  // are statistically independent for b != c.
  static Rng derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = mix(seed ^ 0x5851f42d4c957f2dULL);
    for (std::uint64_t id : path) {
      s = mix(s ^ mix(id + 0x14057b7ef767814fULL));
    }
    return Rng(s);
  }

  // Uniform double in [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform double in (0, 1] (safe as a log argument).
  double uniform_pos() { return 1.0 - uniform(); }

  // Standard normal via Box-Muller (no cached spare, so consumption per
  // call is fixed).
  double normal() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Unbiased integer in [0, bound) (Lemire-style rejection).
  std::uint64_t below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = (*this)();
      if (r >= threshold) return r % bound;
    }
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 31)) * 0x7fb5d329728ea185ULL;
    z = (z ^ (z >> 27)) * 0x81dadef4bc2dd44dULL;
    return z ^ (z >> 33);
  }

  std::uint64_t state_;
};

}  // namespace phylokern

#endif  // PHYLOKERN_RNG_HPP
