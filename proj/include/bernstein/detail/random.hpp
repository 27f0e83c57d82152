#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace bernstein {

//! The generator used everywhere. std::mt19937_64 output is fully specified by
//! the standard, and the conversions below avoid the implementation-defined
//! std::*_distribution classes, so seeded streams are portable.
using Rng = std::mt19937_64;

namespace detail {

inline std::uint64_t
splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

} // namespace detail

//! Seed of the independent substream `stream` derived from a master seed.
inline std::uint64_t
substream_seed(std::uint64_t seed, std::uint64_t stream)
{
  return detail::splitmix64(detail::splitmix64(seed) ^
                            detail::splitmix64(stream + 0x632be59bd9b4e019ULL));
}

inline Rng
make_rng(std::uint64_t seed, std::uint64_t stream)
{
  return Rng(substream_seed(seed, stream));
}

//! Uniform on [0, 1) with 53 random bits.
inline double
uniform01(Rng& rng)
{
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

//! Uniform on the open interval (0, 1).
inline double
uniform_open(Rng& rng)
{
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

//! Standard normal by Box-Muller (one value per call, the sine branch unused).
inline double
standard_normal(Rng& rng)
{
  const double u1 = uniform_open(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace bernstein
