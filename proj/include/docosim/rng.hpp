#ifndef DOCOSIM_RNG_HPP
#define DOCOSIM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace docosim
{

inline constexpr std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t v)
{
  return splitmix64(seed ^ splitmix64(v + 0x632be59bd9b4e019ULL));
}

//
// Counter-based generator: the stream is a pure function of its key, so any
// (seed, t, i) cell of a schedule can be drawn in any order without storing
// state for the whole horizon.
//
class CounterRng
{
public:
  CounterRng(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) : key_(seed)
  {
    for (std::uint64_t v : ids)
    {
      key_ = hash_combine(key_, v);
    }
  }

  std::uint64_t next() { return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double sign() { return (next() >> 63) ? 1.0 : -1.0; }

  bool bernoulli(double p) { return uniform() < p; }

  double normal()
  {
    // Box-Muller; 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index)
{
  return hash_combine(master, index);
}

}  // namespace docosim

#endif  // DOCOSIM_RNG_HPP
